"""Numerical laboratory for rank-one transfer operators and the GL_n Hankel transform."""
__version__ = "0.1.0"
