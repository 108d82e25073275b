"""Challenge/attest verification service.

``GET /challenge`` returns ``{"nonce": <hex>, "expires_in": <seconds>}``.
``POST /attest`` takes a binary bundle envelope whose nonce echo must be an
outstanding challenge; each nonce is consumed by the first attempt that
names it, whatever the verdict.

Status codes: 400 malformed body, 401 unknown / expired / already used
nonce, 200 with ``{"verdict": "accept" | "reject", "reason", ...}``.
"""
from __future__ import annotations

import json
import logging
import secrets
import threading
import time
from dataclasses import dataclass
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable

from zksvm.errors import DecodeError
from zksvm.model import SvmModel
from zksvm.protocol import verify_bundle
from zksvm.wire import decode_bundle

log = logging.getLogger(__name__)

NONCE_BYTES = 32
DEFAULT_TTL = 120.0
MAX_BODY = 8 << 20

OK, UNKNOWN, EXPIRED, USED = "ok", "unknown", "expired", "used"


@dataclass(frozen=True)
class ChallengeTicket:
    nonce: bytes
    issued_at: float
    expires_at: float

    def to_json(self, now: float) -> dict:
        return {"nonce": self.nonce.hex(), "expires_in": max(0.0, round(self.expires_at - now, 3))}


class NonceTable:
    """Outstanding challenges; the one piece of shared mutable state."""

    def __init__(self, ttl: float = DEFAULT_TTL, clock: Callable[[], float] = time.monotonic):
        self.ttl = ttl
        self.clock = clock
        self._lock = threading.Lock()
        self._tickets: dict[bytes, ChallengeTicket] = {}
        self._retired: dict[bytes, tuple[str, float]] = {}    # nonce -> (USED | EXPIRED, expiry)

    def issue(self) -> ChallengeTicket:
        now = self.clock()
        ticket = ChallengeTicket(secrets.token_bytes(NONCE_BYTES), now, now + self.ttl)
        with self._lock:
            self._evict(now)
            self._tickets[ticket.nonce] = ticket
        return ticket

    def consume(self, nonce: bytes) -> str:
        now = self.clock()
        with self._lock:
            self._evict(now)
            ticket = self._tickets.pop(nonce, None)
            if ticket is None:
                status = self._retired.get(nonce, (UNKNOWN, 0.0))[0]
            elif now >= ticket.expires_at:
                status = EXPIRED
                self._retired[nonce] = (EXPIRED, ticket.expires_at)
            else:
                status = OK
                self._retired[nonce] = (USED, ticket.expires_at)
            return status

    def _evict(self, now: float) -> None:
        for k in [k for k, t in self._tickets.items() if now >= t.expires_at]:
            self._retired[k] = (EXPIRED, self._tickets.pop(k).expires_at)
        # retired nonces are remembered for one more TTL so late attempts get
        # a precise reason; after that they are simply unknown
        for k in [k for k, (_, exp) in self._retired.items() if now >= exp + self.ttl]:
            del self._retired[k]

    def __len__(self):
        with self._lock:
            return len(self._tickets)


class AttestationService:
    """Transport-independent request handling."""

    def __init__(self, model: SvmModel, ttl: float = DEFAULT_TTL, clock: Callable[[], float] = time.monotonic,
                 workers: int | None = None):
        self.model = model
        self.params = model.params()
        self.nonces = NonceTable(ttl, clock)
        self.workers = workers

    def challenge(self) -> tuple[int, dict]:
        ticket = self.nonces.issue()
        return HTTPStatus.OK, ticket.to_json(self.nonces.clock())

    def attest(self, body: bytes) -> tuple[int, dict]:
        try:
            bundle = decode_bundle(body)
        except DecodeError as exc:
            return HTTPStatus.BAD_REQUEST, {"error": "malformed bundle", "detail": str(exc)}
        status = self.nonces.consume(bytes(bundle.nonce))
        if status != OK:
            reason = {USED: "replay", EXPIRED: "expired nonce", UNKNOWN: "unknown nonce"}[status]
            return HTTPStatus.UNAUTHORIZED, {"error": reason}
        verdict = verify_bundle(self.model, bundle, bundle.nonce, self.workers, self.params)
        return HTTPStatus.OK, {
            "verdict": "accept" if verdict.accepted else "reject",
            "reason": verdict.reason,
            "procedure": verdict.procedure,
            "vector": verdict.vector,
            "score": verdict.score,
            "s": verdict.s,
        }


def make_handler(service: AttestationService):
    class Handler(BaseHTTPRequestHandler):
        server_version = "zksvm"

        def _send(self, status: int, doc: dict) -> None:
            body = json.dumps(doc).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):
            if self.path.split("?", 1)[0] == "/challenge":
                self._send(*service.challenge())
            else:
                self._send(HTTPStatus.NOT_FOUND, {"error": "not found"})

        def do_POST(self):
            if self.path.split("?", 1)[0] != "/attest":
                self._send(HTTPStatus.NOT_FOUND, {"error": "not found"})
                return
            try:
                length = int(self.headers.get("Content-Length", ""))
            except ValueError:
                self._send(HTTPStatus.BAD_REQUEST, {"error": "missing Content-Length"})
                return
            if not 0 < length <= MAX_BODY:
                self._send(HTTPStatus.BAD_REQUEST, {"error": "bad body length"})
                return
            self._send(*service.attest(self.rfile.read(length)))

        def log_message(self, fmt, *args):
            log.info("%s %s", self.address_string(), fmt % args)

    return Handler


def make_server(service: AttestationService, host: str = "127.0.0.1", port: int = 8080) -> ThreadingHTTPServer:
    server = ThreadingHTTPServer((host, port), make_handler(service))
    server.daemon_threads = True
    return server
