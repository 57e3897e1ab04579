"""
Perception Package

Oracle segmentation and mask hygiene:
- Corrupted segmentation and point-prompt segmentation
- Filtering, NMS, marker placement and run-length encoding
- Annotated images, simulated tracking and mask fine-tuning
"""
