"""Contextual modal type theory with polymorphic contexts, and a translation from
the linear-temporal calculus into it."""

__version__ = "0.1.0"
