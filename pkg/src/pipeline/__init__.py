"""
Pipeline Package

The retrieval state machine:
- Phase transition table and trace checks
- Master arm choice and cooperative point selection
- Attempt and episode runners
"""
