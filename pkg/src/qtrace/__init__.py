"""Deformed (Tsallis) matrix calculus and numerical verification of its trace inequalities."""
__version__ = "0.1.0"
