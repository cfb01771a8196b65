"""Single-URL probe protocol.

HEAD first to keep target load down; GET only when the HEAD verdict would be
Online (to confirm and, on the first ever success, keep the served body) or
when HEAD returned no Content-Type to decide on.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from ..errors import TransportError

ONLINE_VERDICT = "online"
OFFLINE_VERDICT = "offline"
PDF_MIME = "application/pdf"


@dataclass
class ProbeOutcome:
    status_code: int
    content_type: str | None
    method: str              # final method the verdict is based on
    vantage: str
    verdict: str             # ONLINE_VERDICT | OFFLINE_VERDICT
    reason: str = ""


def _mime(content_type: str | None) -> str | None:
    if content_type is None:
        return None
    return content_type.split(";", 1)[0].strip().lower()


def _classify(status: int, content_type: str | None):
    if status >= 300:
        if status < 400:
            return OFFLINE_VERDICT, f"redirect (status {status})"
        return OFFLINE_VERDICT, f"status {status}"
    if _mime(content_type) != PDF_MIME:
        return OFFLINE_VERDICT, f"content-type {_mime(content_type) or 'missing'}"
    return ONLINE_VERDICT, ""


class BodyStore:
    """Keeps the first successfully fetched body per URL, digest-addressed.

    The url->digest index is persisted alongside the bodies so "first visit"
    survives restarts.
    """

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._index = self.directory / "bodies.tsv"
        self._digests: dict = {}
        if self._index.exists():
            for line in self._index.read_text().splitlines():
                if line:
                    digest, url = line.split("\t", 1)
                    self._digests[url] = digest

    def has(self, url: str) -> bool:
        return url in self._digests

    def put(self, url: str, body: bytes) -> str:
        digest = hashlib.sha256(body).hexdigest()
        path = self.directory / f"{digest}.pdf"
        if not path.exists():
            path.write_bytes(body)
        self._digests[url] = digest
        with open(self._index, "a") as fh:
            fh.write(f"{digest}\t{url}\n")
        return digest

    def digest(self, url: str) -> str | None:
        return self._digests.get(url)


def probe_once(url: str, vantage: str, transport, body_store=None) -> ProbeOutcome:
    """One HEAD(+GET) cycle; raises TransportError on network failure."""
    status, headers = transport.head(url, vantage)
    content_type = headers.get("content-type") if headers else None

    if status >= 300:
        verdict, reason = _classify(status, content_type)
        return ProbeOutcome(status, content_type, "HEAD", vantage, verdict, reason)

    if content_type is not None and _mime(content_type) != PDF_MIME:
        verdict, reason = _classify(status, content_type)
        return ProbeOutcome(status, content_type, "HEAD", vantage, verdict, reason)

    # HEAD looked online (or could not tell): confirm with GET
    get_status, get_headers, body = transport.get(url, vantage)
    get_ct = get_headers.get("content-type") if get_headers else None
    verdict, reason = _classify(get_status, get_ct)
    if verdict == ONLINE_VERDICT and body_store is not None and not body_store.has(url):
        body_store.put(url, body or b"")
    return ProbeOutcome(get_status, get_ct, "GET", vantage, verdict, reason)


class HttpxTransport:
    """Live transport; vantages map to named proxy URLs ("" = direct)."""

    def __init__(self, user_agent: str, proxies: dict | None = None,
                 timeout: float = 20.0):
        self.user_agent = user_agent
        self.proxies = proxies or {}
        self.timeout = timeout

    def _client(self, vantage):
        import httpx

        proxy = self.proxies.get(vantage) or None
        return httpx.Client(
            headers={"User-Agent": self.user_agent},
            proxy=proxy, timeout=self.timeout, follow_redirects=False,
        )

    def head(self, url, vantage):
        import httpx

        try:
            with self._client(vantage) as client:
                resp = client.head(url)
        except httpx.HTTPError as exc:
            raise TransportError(str(exc)) from exc
        return resp.status_code, {k.lower(): v for k, v in resp.headers.items()}

    def get(self, url, vantage):
        import httpx

        try:
            with self._client(vantage) as client:
                resp = client.get(url)
        except httpx.HTTPError as exc:
            raise TransportError(str(exc)) from exc
        return (resp.status_code,
                {k.lower(): v for k, v in resp.headers.items()},
                resp.content)
