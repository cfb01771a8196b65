"""Transport guard for the scanner: idempotent, body-less requests only."""

from __future__ import annotations

ALLOWED_METHODS = ("GET", "HEAD")


class GuardedTransport:
    """Wraps a fetch callable and rejects anything that could change state."""

    def __init__(self, fetch):
        self._fetch = fetch

    def request(self, method: str, url: str, body=None):
        if method.upper() not in ALLOWED_METHODS:
            raise ValueError(f"scanner may not send {method} requests")
        if body is not None:
            raise ValueError("scanner requests must not carry a body")
        return self._fetch(method.upper(), url)
