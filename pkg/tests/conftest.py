import json
import socket
import threading
from collections import deque
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def pilot_dir() -> Path:
    return FIXTURES / "pilot"


@pytest.fixture
def no_network(monkeypatch):
    """Makes any socket connection attempt fail the test."""

    def blocked(self, *args, **kwargs):
        raise AssertionError("network access attempted during a network-free test")

    monkeypatch.setattr(socket.socket, "connect", blocked)


def total_body(hits) -> str:
    return json.dumps({"searchInformation": {"totalResults": str(hits)}})


class _StubHandler(BaseHTTPRequestHandler):
    def do_GET(self):
        from urllib.parse import parse_qs, urlparse

        params = {k: v[0] for k, v in parse_qs(urlparse(self.path).query).items()}
        server = self.server
        with server.lock:
            server.seen.append(params)
            if server.responses:
                status, body = server.responses.popleft()
            else:
                status, body = 200, total_body(server.default_hits)
        payload = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, format, *args):
        pass


class StubEngine:
    """Scriptable local search-API endpoint for exercising the live backend."""

    def __init__(self) -> None:
        self.server = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
        self.server.lock = threading.Lock()
        self.server.seen = []
        self.server.responses = deque()
        self.server.default_hits = 12345
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    @property
    def url(self) -> str:
        host, port = self.server.server_address[:2]
        return f"http://{host}:{port}"

    @property
    def seen(self) -> list:
        with self.server.lock:
            return list(self.server.seen)

    def queue(self, status: int, body: str) -> None:
        with self.server.lock:
            self.server.responses.append((status, body))

    def queue_total(self, hits) -> None:
        self.queue(200, total_body(hits))

    def close(self) -> None:
        self.server.shutdown()
        self.server.server_close()
        self.thread.join(timeout=5)


@pytest.fixture
def stub_engine():
    engine = StubEngine()
    yield engine
    engine.close()
