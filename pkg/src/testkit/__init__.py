# Testkit package initialization
