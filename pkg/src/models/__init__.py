# Garment pile, perception, reasoning, affordance and episode models
