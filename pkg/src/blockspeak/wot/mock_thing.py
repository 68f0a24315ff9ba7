"""A minimal web thing: one boolean property and one toggle action.

Used by the integration tests and the demos as a stand-in for a real device.
Serves its own Thing Description and records every request it handles so
tests can assert on methods, paths and headers.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional


@dataclass(frozen=True)
class RequestRecord:
    method: str
    path: str
    content_type: Optional[str]
    accept: Optional[str]


class MockLamp:
    """An in-process lamp thing. `start()` binds an ephemeral port."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0, on: bool = False):
        self._host = host
        self._port = port
        self.on = on
        self.request_log: list[RequestRecord] = []
        self._lock = threading.Lock()
        self._server: Optional[ThreadingHTTPServer] = None
        self._thread: Optional[threading.Thread] = None

    # -- lifecycle -----------------------------------------------------------

    def start(self) -> str:
        lamp = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # keep test output clean
                pass

            def _record(self):
                lamp._record(RequestRecord(
                    method=self.command,
                    path=self.path,
                    content_type=self.headers.get("Content-Type"),
                    accept=self.headers.get("Accept"),
                ))

            def _json(self, code: int, payload) -> None:
                body = json.dumps(payload).encode()
                self.send_response(code)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                self._record()
                if self.path == "/td":
                    self._json(200, lamp.td())
                elif self.path == "/properties/on":
                    self._json(200, {"value": lamp.on})
                else:
                    self._json(404, {"error": "no such resource"})

            def do_PUT(self):
                self._record()
                if self.path != "/properties/on":
                    self._json(404, {"error": "no such resource"})
                    return
                length = int(self.headers.get("Content-Length", 0))
                try:
                    value = json.loads(self.rfile.read(length))
                except ValueError:
                    self._json(400, {"error": "not JSON"})
                    return
                if not isinstance(value, bool):
                    self._json(400, {"error": "expected a boolean"})
                    return
                lamp.on = value
                self._json(200, {"value": lamp.on})

            def do_POST(self):
                self._record()
                if self.path != "/actions/toggle":
                    self._json(404, {"error": "no such resource"})
                    return
                length = int(self.headers.get("Content-Length", 0))
                if length:
                    self.rfile.read(length)
                lamp.on = not lamp.on
                self._json(200, {"value": lamp.on})

        self._server = ThreadingHTTPServer((self._host, self._port), Handler)
        self._thread = threading.Thread(
            target=lambda: self._server.serve_forever(poll_interval=0.05),
            daemon=True)
        self._thread.start()
        return self.base_url

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None

    def __enter__(self) -> "MockLamp":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.stop()

    # -- state ----------------------------------------------------------------

    @property
    def base_url(self) -> str:
        assert self._server is not None, "lamp not started"
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def _record(self, record: RequestRecord) -> None:
        with self._lock:
            self.request_log.append(record)

    def td(self) -> dict:
        return {
            "@context": "https://www.w3.org/2019/wot/td/v1",
            "id": "urn:example:lamp-1",
            "title": "lamp",
            "securityDefinitions": {"nosec_sc": {"scheme": "nosec"}},
            "security": ["nosec_sc"],
            "base": self.base_url,
            "properties": {
                "on": {
                    "type": "boolean",
                    "forms": [{"href": "/properties/on"}],
                },
            },
            "actions": {
                "toggle": {
                    "forms": [{"href": "/actions/toggle"}],
                },
            },
        }
