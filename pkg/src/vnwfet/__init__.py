"""Junctionless vertical-nanowire FET modeling and logic-cell toolkit."""

__version__ = "0.1.0"
