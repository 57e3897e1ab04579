"""
Data Loaders Package

JSON and JSONL persistence for scenes, mask sets, affordance models,
training datasets and episode logs.
"""
