"""HTTP sidecar exposing a sentence-embedding model behind the embed protocol."""

from .app import ServiceConfig, create_app
from .export import export_fixture
from .model import SentenceTransformerModel

__version__ = "0.1.0"

__all__ = ["ServiceConfig", "SentenceTransformerModel", "create_app",
           "export_fixture"]
