"""Globally controlled quantum cellular automaton: compiler, synthesizer, simulator."""

from .backend import BACKEND_NAME

__all__ = ["BACKEND_NAME"]
__version__ = "0.1.0"
