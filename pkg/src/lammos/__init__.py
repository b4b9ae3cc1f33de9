"""Deterministic simulator and verification toolkit for a motorized-screw
latching mechanism, its in-pipe robot reconfiguration procedure, and an
exoskeleton joint-lock application."""

__version__ = "0.1.0"
