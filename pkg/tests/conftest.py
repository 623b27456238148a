import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

import pytest


class _StubHandler(BaseHTTPRequestHandler):
    """Tiny origin server exercising every fetch failure mode."""

    protocol_version = "HTTP/1.1"

    def log_message(self, *args):
        pass

    def _send(self, status, body=b"", content_type="text/html", extra=None):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        for name, value in (extra or {}).items():
            self.send_header(name, value)
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        parts = urlsplit(self.path)
        params = parse_qs(parts.query)
        route = parts.path

        if route == "/ok":
            self._send(200, b"<p>" + b"stub page content " * 8 + b"</p>")
        elif route == "/missing":
            self._send(404, b"not here")
        elif route == "/pdf":
            self._send(200, b"%PDF-1.4", content_type="application/pdf")
        elif route == "/slow":
            time.sleep(int(params.get("ms", ["1000"])[0]) / 1000.0)
            self._send(200, b"<p>" + b"slow page content " * 8 + b"</p>")
        elif route == "/big":
            self._send(200, b"<p>" + b"x" * 100_000 + b"</p>")
        elif route.startswith("/redirect/"):
            hops = int(route.rsplit("/", 1)[1])
            target = "/ok" if hops <= 1 else f"/redirect/{hops - 1}"
            self._send(302, extra={"Location": target})
        elif route == "/counted":
            self.server.hit_count += 1
            body = f"<p>hit number {self.server.hit_count} recorded here for caching checks</p>"
            self._send(200, body.encode())
        elif route == "/echo-ua":
            agent = self.headers.get("User-Agent", "")
            self._send(200, f"<p>agent was {agent} on this request</p>".encode())
        elif route.startswith("/page/"):
            name = route.rsplit("/", 1)[1]
            delay_ms = int(params.get("delay_ms", ["0"])[0])
            if delay_ms:
                time.sleep(delay_ms / 1000.0)
            body = f"<p>generated page {name} with filler text repeated {'again ' * 12}</p>"
            self._send(200, body.encode())
        else:
            self._send(404, b"unknown route")


class _QuietServer(ThreadingHTTPServer):
    def handle_error(self, request, client_address):
        pass  # clients abort mid-response in the timeout/oversize tests


@pytest.fixture(scope="session")
def stub_server():
    server = _QuietServer(("127.0.0.1", 0), _StubHandler)
    server.hit_count = 0
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


@pytest.fixture
def write_results(tmp_path):
    """Write a result-list JSON file and return its path."""

    def _write(query, results, name="results.json"):
        path = tmp_path / name
        path.write_text(json.dumps({"query": query, "results": results}),
                        encoding="utf-8")
        return str(path)

    return _write
