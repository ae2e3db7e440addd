"""Offensive-language classification for the OLID subtasks A, B and C."""

__version__ = "0.1.0"
