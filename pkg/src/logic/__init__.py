# Logic package initialization
