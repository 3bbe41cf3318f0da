"""Determinant operators whose vanishing is necessary for an embedding."""
