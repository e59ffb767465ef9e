# Words package initialization
