"""Content-addressed response cache wrapping any provider backend.

Layout: ``<root>/<capability>/<request_hash>.json`` (``.wav`` for tts).
Writes are atomic (write-temp-then-rename) so concurrent callers never see
a partial entry.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .base import TTS, Provider, request_hash


class CachedProvider(Provider):
    def __init__(self, inner: Provider, root_dir: str | Path):
        self._inner = inner
        self._root = Path(root_dir)

    def _entry_path(self, capability: str, payload) -> Path:
        ext = "wav" if capability == TTS else "json"
        return self._root / capability / f"{request_hash(payload)}.{ext}"

    def call(self, capability: str, payload):
        path = self._entry_path(capability, payload)
        if path.exists():
            if capability == TTS:
                return path.read_bytes()
            return json.loads(path.read_text(encoding="utf-8"))["result"]

        result = self._inner.call(capability, payload)
        path.parent.mkdir(parents=True, exist_ok=True)
        if capability == TTS:
            data = result
        else:
            data = json.dumps({"result": result}, ensure_ascii=False,
                              sort_keys=True).encode("utf-8")
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return result
