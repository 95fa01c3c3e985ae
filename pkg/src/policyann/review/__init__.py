"""Dual-review ground-truth curation: service state machine and HTTP API."""

from .service import ReviewService, ReviewTask, ReviewDiff

__all__ = ["ReviewService", "ReviewTask", "ReviewDiff", "create_app"]


def create_app(*args, **kwargs):
    # imported lazily so the service layer works without fastapi installed
    from .app import create_app as _create_app

    return _create_app(*args, **kwargs)
