"""
Harness Package

Benchmark metrics, experiment and ablation runners, and report tables.
"""
