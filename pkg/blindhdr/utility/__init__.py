"""Utility helpers shared across the toolkit."""

__all__ = [
    "config",
    "files",
]
