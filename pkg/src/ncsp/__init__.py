"""Finite-dimensional vector-valued Schatten classes S_p[E] and completely
p-summing norms, computed as certified lower/upper brackets."""

__version__ = "0.1.0"
