"""Blind HDR image quality assessment with disentangled noise and error-resistance networks."""

__version__ = "0.1.0"
