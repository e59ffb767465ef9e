# Data automata package initialization
