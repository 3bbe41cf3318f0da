"""Exact jet-space obstructions to embedding real-analytic hypersurfaces
into hyperquadrics."""

__version__ = "0.1.0"
