"""HTTP service wrapping the scoring toolkit."""

from .app import create_app

__all__ = ["create_app"]
