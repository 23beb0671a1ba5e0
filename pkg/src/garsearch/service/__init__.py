"""HTTP facade over the library plus session state for the manual-query
workflow."""

from .app import create_app
from .config import ServiceConfig, load_config
from .sessions import Selection, Session, SessionStore

__all__ = ["create_app", "ServiceConfig", "load_config", "Selection", "Session", "SessionStore"]
