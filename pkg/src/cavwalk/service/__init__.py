"""HTTP service exposing the walk, cavity and limit-law computations."""

from .app import app

__all__ = ["app"]
