"""A local HTTP endpoint that answers the extractor's query shapes.

Fault injection is scripted per shape id (``SQ2``, ``SQ2F``, ``PROBE_BIND``
...) or for every query via the ``"*"`` key.
"""

from __future__ import annotations

import errno
import json
import logging
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Union
from urllib.parse import parse_qs, urlparse

from ..errors import PortInUse
from ..sparql.results import MEDIA_TYPE, serialize
from .evaluate import UnknownShape, evaluate
from .store import FixtureStore

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Behavior:
    kind: str = "ok"
    arg: Union[int, str, None] = None

    def __post_init__(self):
        if self.kind == "timeout_n_times":
            if not isinstance(self.arg, int) or self.arg < 0:
                raise ValueError("timeout_n_times needs n >= 0")
        elif self.kind == "http_error":
            if not isinstance(self.arg, int) or not 400 <= self.arg <= 599:
                raise ValueError("http_error code must lie in [400, 599]")
        elif self.kind == "reject_keyword":
            if not self.arg:
                raise ValueError("reject_keyword needs a keyword")
        elif self.kind != "ok":
            raise ValueError(f"unknown behavior {self.kind!r}")

    @classmethod
    def ok(cls) -> "Behavior":
        return cls()

    @classmethod
    def timeout_n_times(cls, n: int) -> "Behavior":
        return cls("timeout_n_times", n)

    @classmethod
    def http_error(cls, code: int) -> "Behavior":
        return cls("http_error", code)

    @classmethod
    def reject_keyword(cls, keyword: str) -> "Behavior":
        return cls("reject_keyword", keyword)


@dataclass
class FaultScript:
    """Scripted misbehaviour.

    ``behaviors`` maps a shape id or ``"*"`` to one behavior or a list of
    them.  A stalled request sleeps ``stall_seconds`` before answering, which
    should exceed the client's timeout.  ``seed`` drives ORDER BY RAND().
    """

    behaviors: dict[str, Union[Behavior, list[Behavior]]] = field(default_factory=dict)
    latency: float = 0.0
    stall_seconds: float = 2.0
    seed: int = 0

    def for_shape(self, shape: str) -> list[tuple[str, Behavior]]:
        out = []
        for key in (shape, "*"):
            items = self.behaviors.get(key, [])
            if isinstance(items, Behavior):
                items = [items]
            out.extend((key, b) for b in items)
        return out


@dataclass(frozen=True)
class RequestLogEntry:
    timestamp_ms: float
    template_id: str
    params: dict


class _Server(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, addr, store: FixtureStore, script: FaultScript):
        self.store = store
        self.script = script
        self.log: list[RequestLogEntry] = []
        self.eval_lock = threading.Lock()
        self.counter_lock = threading.Lock()
        self.stall_counts: dict[tuple, int] = {}
        super().__init__(addr, _Handler)


class _Handler(BaseHTTPRequestHandler):
    server: _Server

    def log_message(self, fmt, *args):  # silence stderr access log
        logger.debug("simulator: " + fmt, *args)

    def do_GET(self):
        query = parse_qs(urlparse(self.path).query).get("query", [""])[0]
        self._answer(query)

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length).decode("utf-8")
        query = parse_qs(body).get("query", [""])[0]
        self._answer(query)

    def _reply(self, status: int, body: str, ctype: str = "text/plain; charset=utf-8"):
        data = body.encode("utf-8")
        try:
            self.send_response(status)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)
        except (BrokenPipeError, ConnectionResetError):
            pass

    def _answer(self, query: str):
        srv = self.server
        stamp = time.time() * 1000.0
        try:
            shape, params, result = evaluate(srv.store, query, srv.script.seed)
        except UnknownShape:
            srv.log.append(RequestLogEntry(stamp, "UNKNOWN", {}))
            self._reply(400, "unsupported query: this endpoint answers template shapes only")
            return
        except Exception as exc:  # bad params in an otherwise known shape
            srv.log.append(RequestLogEntry(stamp, "UNKNOWN", {}))
            self._reply(400, f"query evaluation failed: {exc}")
            return
        srv.log.append(RequestLogEntry(stamp, shape, params))

        for key, behavior in srv.script.for_shape(shape):
            if behavior.kind == "reject_keyword" and str(behavior.arg) in query:
                self._reply(400, f"syntax error: keyword {behavior.arg} not supported")
                return
        for key, behavior in srv.script.for_shape(shape):
            if behavior.kind == "http_error":
                self._reply(int(behavior.arg), f"scripted error {behavior.arg}")
                return
            if behavior.kind == "timeout_n_times":
                with srv.counter_lock:
                    seen = srv.stall_counts.get((key, shape), 0)
                    srv.stall_counts[(key, shape)] = seen + 1
                if seen < int(behavior.arg):
                    time.sleep(srv.script.stall_seconds)
                    self._reply(503, "stalled")
                    return
        with srv.eval_lock:
            if srv.script.latency:
                time.sleep(srv.script.latency / 1000.0)
            self._reply(200, serialize(result), MEDIA_TYPE)


class SimulatorHandle:
    """A running simulator; use as a context manager or call :meth:`stop`."""

    def __init__(self, server: _Server):
        self._server = server
        self._thread = threading.Thread(target=server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    @property
    def url(self) -> str:
        return f"http://127.0.0.1:{self.port}/sparql"

    @property
    def requests(self) -> list[RequestLogEntry]:
        return list(self._server.log)

    def requests_for(self, template_id: str) -> list[RequestLogEntry]:
        return [r for r in self._server.log if r.template_id == template_id]

    def clear_log(self) -> None:
        self._server.log.clear()

    def write_log(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("timestamp_ms\ttemplate_id\tparams\n")
            for r in self.requests:
                fh.write(f"{r.timestamp_ms:.3f}\t{r.template_id}\t{json.dumps(r.params, sort_keys=True)}\n")

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)

    def __enter__(self) -> "SimulatorHandle":
        return self

    def __exit__(self, *exc) -> None:
        self.stop()


def serve(store: FixtureStore, script: FaultScript | None = None, port: int = 0,
          host: str = "127.0.0.1") -> SimulatorHandle:
    """Start a simulator on ``port`` (0 picks a free one)."""
    try:
        server = _Server((host, port), store, script or FaultScript())
    except OSError as exc:
        if exc.errno in (errno.EADDRINUSE, errno.EACCES):
            raise PortInUse(f"port {port} is not available") from exc
        raise
    return SimulatorHandle(server)
