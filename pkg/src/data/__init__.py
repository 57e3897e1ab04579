"""
Data Package

Persistence and validation for everything the pipeline records:
- Scene, mask set, model, dataset and episode-log files
- Episode log validation
"""
