"""Provider boundary for AI-dependent capabilities.

Every capability has two interchangeable implementations: a deterministic
offline engine (:class:`OfflineEngine`) and a remote HTTP JSON client
(:class:`RemoteProvider`), optionally wrapped in a content-addressed
response cache (:class:`CachedProvider`). Pipeline code talks to the typed
facade :class:`ProviderSuite` only.
"""

from .base import CAPABILITIES, Provider, ProviderSuite, request_hash
from .cache import CachedProvider
from .offline import OfflineEngine
from .remote import RemoteProvider

__all__ = [
    "CAPABILITIES",
    "Provider",
    "ProviderSuite",
    "request_hash",
    "CachedProvider",
    "OfflineEngine",
    "RemoteProvider",
]
