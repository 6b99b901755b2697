"""Generic HTTP adapter for commercial moderation APIs.

The secret is sourced from an environment variable at request time; config
files only ever hold the variable's name.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Any

import requests

from ..errors import AuthError, ConfigError, ProtocolError, TransportError
from ..models import LABELS


@dataclass
class HttpTargetConfig:
    endpoint: str
    image_field: str = "image"
    label_path: str = "label"          # dotted path into the response JSON
    label_map: dict[str, str] = field(default_factory=dict)  # value -> toxic/non_toxic
    auth_header: str | None = None
    secret_env: str | None = None
    ground_truth_field: str | None = None
    timeout_ms: int = 10000
    name: str = "http"

    def __post_init__(self):
        for mapped in self.label_map.values():
            if mapped not in LABELS:
                raise ConfigError(f"label_map maps to unknown label {mapped!r}")

    @staticmethod
    def from_file(path: str) -> "HttpTargetConfig":
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        try:
            return HttpTargetConfig(**obj)
        except TypeError as exc:
            raise ConfigError(f"bad target config {path}: {exc}") from exc


def _dig(obj: Any, path: str) -> Any:
    cur = obj
    for part in path.split("."):
        if isinstance(cur, list):
            try:
                cur = cur[int(part)]
                continue
            except (ValueError, IndexError):
                raise ProtocolError(f"response missing path {path!r}")
        if not isinstance(cur, dict) or part not in cur:
            raise ProtocolError(f"response missing path {path!r}")
        cur = cur[part]
    return cur


class HttpClient:
    def __init__(self, cfg: HttpTargetConfig, session: requests.Session | None = None):
        self.cfg = cfg
        self.name = cfg.name
        self._session = session or requests.Session()

    def _headers(self) -> dict[str, str]:
        if not self.cfg.auth_header:
            return {}
        if not self.cfg.secret_env or self.cfg.secret_env not in os.environ:
            raise AuthError(f"environment variable {self.cfg.secret_env!r} not set")
        return {self.cfg.auth_header: os.environ[self.cfg.secret_env]}

    def moderate(self, artifact: bytes, artifact_format: str,
                 ground_truth: str | None = None):
        if not artifact:
            raise ProtocolError("empty artifact")
        files = {self.cfg.image_field: (f"case.{artifact_format}", artifact,
                                        f"image/{artifact_format}")}
        data = {}
        if self.cfg.ground_truth_field and ground_truth is not None:
            data[self.cfg.ground_truth_field] = ground_truth
        try:
            resp = self._session.post(self.cfg.endpoint, files=files, data=data,
                                      headers=self._headers(),
                                      timeout=self.cfg.timeout_ms / 1000.0)
        except requests.RequestException as exc:
            raise TransportError(f"request failed: {exc}", retryable=True) from exc
        if resp.status_code in (401, 403):
            raise AuthError(f"target rejected credentials (HTTP {resp.status_code})")
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransportError(f"HTTP {resp.status_code}", retryable=True,
                                 status=resp.status_code)
        if not 200 <= resp.status_code < 300:
            raise TransportError(f"HTTP {resp.status_code}", retryable=False,
                                 status=resp.status_code)
        try:
            payload = resp.json()
        except ValueError as exc:
            raise ProtocolError(f"non-JSON response: {exc}") from exc
        value = _dig(payload, self.cfg.label_path)
        mapping = self.cfg.label_map or {"toxic": "toxic", "non_toxic": "non_toxic"}
        key = str(value)
        if key not in mapping:
            raise ProtocolError(f"unmapped label value {value!r}")
        return mapping[key], payload
