# Automata package initialization
