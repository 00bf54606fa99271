"""Read-only HTTP service exposing a precomputed grid artifact as JSON.

Endpoints:
  GET /meta            grids, variable names, config hash
  GET /cell?l1=&l2=    nearest cell: networks, differences, counts, fdr_hat
  GET /curve?l1=       (lambda2, n_discoveries, fdr_hat) rows at fixed lambda1

Requests outside the precomputed grid range get 400; unknown routes 404.
The artifact is immutable once loaded, so concurrent reads need no locking;
an optional static directory (the explorer bundle) is served at /.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import os
import posixpath
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

from .artifacts import GridArtifact

logger = logging.getLogger(__name__)

_FALLBACK_PAGE = """<!doctype html>
<title>diffnet grid service</title>
<h1>diffnet grid service</h1>
<p>No explorer bundle configured. JSON endpoints:</p>
<ul>
<li><a href="/meta">/meta</a></li>
<li>/cell?l1=&lt;value&gt;&amp;l2=&lt;value&gt;</li>
<li>/curve?l1=&lt;value&gt;</li>
</ul>
"""


def _cell_payload(cell) -> dict:
    return {
        "lambda1": cell.lambda1,
        "lambda2": cell.lambda2,
        "networks": {
            label: [[i, j, w] for i, j, w in pairs]
            for label, pairs in cell.networks.items()
        },
        "differences": cell.differences,
        "n_discoveries": cell.n_discoveries,
        "fdr_hat": cell.fdr_hat,
    }


class GridRequestHandler(BaseHTTPRequestHandler):
    server_version = "diffnet-grid/1"

    @property
    def artifact(self) -> GridArtifact:
        return self.server.artifact

    def log_message(self, format, *args):  # noqa: A002 - stdlib signature
        logger.debug("%s - %s", self.address_string(), format % args)

    def _send_json(self, payload, status: int = 200) -> None:
        body = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _param(self, query: dict, name: str) -> float:
        values = query.get(name)
        if not values:
            raise ValueError(f"missing query parameter '{name}'")
        try:
            return float(values[0])
        except ValueError:
            raise ValueError(f"parameter '{name}' is not a number") from None

    def _serve_static(self, path: str) -> None:
        ui_dir = self.server.ui_dir
        if ui_dir is None:
            if path in ("/", "/index.html"):
                body = _FALLBACK_PAGE.encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "text/html; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
                return
            self._send_json({"error": "unknown route"}, status=404)
            return
        relative = posixpath.normpath(path.lstrip("/")) or "index.html"
        if relative in (".", ""):
            relative = "index.html"
        full = os.path.realpath(os.path.join(ui_dir, relative))
        root = os.path.realpath(ui_dir)
        if not full.startswith(root + os.sep) and full != root:
            self._send_json({"error": "unknown route"}, status=404)
            return
        if os.path.isdir(full):
            full = os.path.join(full, "index.html")
        if not os.path.isfile(full):
            self._send_json({"error": "unknown route"}, status=404)
            return
        ctype = mimetypes.guess_type(full)[0] or "application/octet-stream"
        with open(full, "rb") as handle:
            body = handle.read()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):  # noqa: N802 - stdlib naming
        url = urlsplit(self.path)
        query = parse_qs(url.query)
        try:
            if url.path == "/meta":
                self._send_json(self.artifact.meta())
            elif url.path == "/cell":
                l1 = self._param(query, "l1")
                l2 = self._param(query, "l2")
                try:
                    cell = self.artifact.cell_at(l1, l2)
                except KeyError as exc:
                    self._send_json({"error": str(exc.args[0])}, status=400)
                    return
                self._send_json(_cell_payload(cell))
            elif url.path == "/curve":
                l1 = self._param(query, "l1")
                try:
                    rows = self.artifact.curve_rows(l1)
                except KeyError as exc:
                    self._send_json({"error": str(exc.args[0])}, status=400)
                    return
                self._send_json({"lambda1": self.artifact._snap(
                    self.artifact.lambda1_grid, l1, "lambda1"), "rows": rows})
            else:
                self._serve_static(url.path)
        except ValueError as exc:
            self._send_json({"error": str(exc)}, status=400)


def parse_bind(bind: str) -> tuple[str, int]:
    host, _, port = bind.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"bind address '{bind}' must look like host:port")
    return host, int(port)


def serve_grid(
    artifact: GridArtifact,
    bind_address: str = "127.0.0.1:8787",
    ui_dir: str | None = None,
) -> ThreadingHTTPServer:
    """Build the server (caller runs serve_forever / shutdown)."""
    artifact.validate()
    host, port = parse_bind(bind_address)
    server = ThreadingHTTPServer((host, port), GridRequestHandler)
    server.artifact = artifact
    server.ui_dir = ui_dir
    logger.info("grid service on http://%s:%d/", host, server.server_address[1])
    return server
