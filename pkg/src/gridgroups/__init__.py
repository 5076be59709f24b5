"""Grid pairings, the groups they present, and mod-p group ring checks."""

__version__ = "0.1.0"
