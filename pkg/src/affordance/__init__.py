"""
Affordance Package

Per-point retrieval affordance:
- Point cloud and handcrafted point features with the selection indicator
- Dense network with a sigmoid head, BCE loss and analytic gradients
- Oracle-labelled data collection, training and grasp point selection
"""
