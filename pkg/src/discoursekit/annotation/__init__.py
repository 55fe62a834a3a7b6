"""Two-annotator adjudication service (session store + HTTP API)."""

from .api import create_app
from .store import (
    EXPORT_POLICIES,
    AgreementReport,
    ConflictError,
    IncompleteAdjudicationError,
    InsufficientDataError,
    Session,
    SessionStore,
)

__all__ = [
    "create_app",
    "EXPORT_POLICIES",
    "AgreementReport",
    "ConflictError",
    "IncompleteAdjudicationError",
    "InsufficientDataError",
    "Session",
    "SessionStore",
]
