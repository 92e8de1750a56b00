"""Intrinsic dimension estimation from Wasserstein-1 decay rates."""

__version__ = "0.1.0"
