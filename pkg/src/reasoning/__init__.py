"""
Reasoning Package

The three decisions of an attempt behind one interface:
- Rule-based reasoner over observable mask and lift summaries
- Privileged reasoner reading the ground-truth scene
- Remote reasoner speaking the /decide wire protocol
"""
