# Reductions package initialization
