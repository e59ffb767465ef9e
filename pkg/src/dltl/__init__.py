# Dltl package initialization
