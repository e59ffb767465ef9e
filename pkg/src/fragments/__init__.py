# Fragments package initialization
