"""Local mock moderation service (test double for end-to-end runs).

Wire protocol: POST /moderate, multipart fields "image" (bytes, required)
and "ground_truth" (UTF-8, optional); response {"label": "toxic"|"non_toxic"}
with HTTP 200. Malformed multipart gets HTTP 400.
"""

from __future__ import annotations

import email.parser
import email.policy
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from ..errors import BindError, ConfigError

MODES = ("always_toxic", "always_benign", "sidecar")


def parse_multipart(content_type: str, body: bytes) -> dict[str, bytes]:
    """Multipart form fields by name. Raises ValueError on malformed input."""
    if not content_type.startswith("multipart/form-data"):
        raise ValueError(f"not multipart: {content_type!r}")
    raw = b"Content-Type: " + content_type.encode("latin-1") + b"\r\n\r\n" + body
    msg = email.parser.BytesParser(policy=email.policy.HTTP).parsebytes(raw)
    if not msg.is_multipart():
        raise ValueError("body is not valid multipart/form-data")
    fields: dict[str, bytes] = {}
    for part in msg.iter_parts():
        name = part.get_param("name", header="content-disposition")
        if name:
            fields[name] = part.get_payload(decode=True) or b""
    return fields


class MockModerationServer:
    """Runs in a background thread; keeps no per-request state."""

    def __init__(self, mode: str = "always_toxic", port: int = 0,
                 lexicon: list[str] | None = None, host: str = "127.0.0.1"):
        if mode not in MODES:
            raise ConfigError(f"unknown mock mode {mode!r}; pick one of {MODES}")
        if mode == "sidecar" and not lexicon:
            raise ConfigError("sidecar mode needs a lexicon")
        self.mode = mode
        self.lexicon = [w.lower() for w in (lexicon or [])]
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                if self.path != "/moderate":
                    self._reply(404, {"error": "unknown endpoint"})
                    return
                try:
                    length = int(self.headers.get("Content-Length", "0"))
                    fields = parse_multipart(self.headers.get("Content-Type", ""),
                                             self.rfile.read(length))
                    if "image" not in fields or not fields["image"]:
                        raise ValueError("missing image field")
                except (ValueError, KeyError) as exc:
                    self._reply(400, {"error": str(exc)})
                    return
                label = outer._judge(fields)
                self._reply(200, {"label": label})

            def _reply(self, status, obj):
                payload = json.dumps(obj).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

        try:
            self._server = ThreadingHTTPServer((host, port), Handler)
        except OSError as exc:
            raise BindError(f"cannot bind {host}:{port}: {exc}") from exc
        self._thread: threading.Thread | None = None

    def _judge(self, fields: dict[str, bytes]) -> str:
        if self.mode == "always_toxic":
            return "toxic"
        if self.mode == "always_benign":
            return "non_toxic"
        text = fields.get("ground_truth", b"").decode("utf-8", "replace").lower()
        words = {w.strip(".,!?;:'\"") for w in text.split()}
        return "toxic" if any(w in words for w in self.lexicon) else "non_toxic"

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    @property
    def url(self) -> str:
        host = self._server.server_address[0]
        return f"http://{host}:{self.port}/moderate"

    def start(self) -> "MockModerationServer":
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self._server.serve_forever()

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread:
            self._thread.join(timeout=5)

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()
