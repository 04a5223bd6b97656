"""Parse, check, ground, plan and verify hierarchical planning problems written in HDDL."""

__version__ = "0.1.0"
