"""HTTP service exposing the modeling toolkit.

The CLI talks to this app in-process by default; `create_app` is also
suitable for running under uvicorn.
"""

from .app import create_app

__all__ = ["create_app"]
