"""
Garment pile retrieval pipeline.

A layered 2.5D garment pile simulator with the perceive, reason, afford, grasp
and cooperate retrieval loop, plus training and benchmark tooling.
"""

__version__ = "0.1.0"
