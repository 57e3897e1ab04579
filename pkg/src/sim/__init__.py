"""
Pile Simulator Package

Layered 2.5D garment piles:
- Procedural scene generation and occupancy queries
- RGB-D rendering, including the post-lift frame
- Grasp oracle, drop-back and shake perturbation
"""
