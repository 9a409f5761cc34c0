"""HTTP JSON client for hosted capability services.

Wire contract: ``POST <base_url>/v1/<capability>`` with body
``{"payload": ..., "temperature": ...}``; the server replies
``{"result": ...}``. The tts result carries base64 WAV bytes under
``{"wav_b64": ...}``. Any non-2xx status or transport error, after
retries, raises ProviderFailure. Prompts live server-side.
"""

from __future__ import annotations

import base64
import logging
import os
import time

import requests

from ..errors import ProviderFailure
from .base import TTS, Provider

log = logging.getLogger(__name__)

AUTH_TOKEN_ENV = "DANMUCAST_AUTH_TOKEN"
DEFAULT_TEMPERATURE = 0.8


class RemoteProvider(Provider):
    def __init__(
        self,
        base_url: str,
        timeout_s: float = 30.0,
        retries: int = 2,
        backoff_s: float = 0.5,
        temperature: float = DEFAULT_TEMPERATURE,
    ):
        self._base_url = base_url.rstrip("/")
        self._timeout_s = timeout_s
        self._retries = retries
        self._backoff_s = backoff_s
        self._temperature = temperature
        self._session = requests.Session()
        token = os.environ.get(AUTH_TOKEN_ENV)
        if token:
            self._session.headers["Authorization"] = f"Bearer {token}"

    def call(self, capability: str, payload):
        url = f"{self._base_url}/v1/{capability}"
        body = {"payload": payload, "temperature": self._temperature}
        last_error: Exception | None = None
        for attempt in range(self._retries + 1):
            if attempt:
                time.sleep(self._backoff_s * 2 ** (attempt - 1))
            try:
                resp = self._session.post(url, json=body, timeout=self._timeout_s)
            except requests.RequestException as exc:
                last_error = exc
                log.warning("%s attempt %d failed: %s", capability, attempt + 1, exc)
                continue
            if not resp.ok:
                last_error = ProviderFailure(
                    f"{capability}: HTTP {resp.status_code}: {resp.text[:200]}"
                )
                log.warning("%s attempt %d: HTTP %d", capability, attempt + 1,
                            resp.status_code)
                continue
            result = resp.json().get("result")
            if capability == TTS:
                return base64.b64decode(result["wav_b64"])
            return result
        raise ProviderFailure(
            f"{capability} failed after {self._retries + 1} attempts: {last_error}"
        )
