# Cascades package initialization
