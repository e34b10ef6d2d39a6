"""HTTP service exposing the screening pipeline."""

from .app import create_app

__all__ = ["create_app"]
