"""Blocklist lookups (Google SafeBrowsing / VirusTotal style providers)."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

from ..errors import ProviderError, QuotaExceeded


@dataclass
class BlocklistStatus:
    url: str
    provider: str            # "GSB" | "VT"
    listed: bool
    detail: int | None = None  # e.g. AV-engine count for VT; only when listed
    checked_at: date | None = None


class QuotaLimitedClient:
    """Wrap a provider callable with a per-day request budget.

    VT answers only a small fraction of lookups, so a missing response is a
    normal outcome, not an error.
    """

    def __init__(self, provider: str, lookup, daily_quota: int):
        self.provider = provider
        self._lookup = lookup
        self.daily_quota = daily_quota
        self._day = None
        self._used = 0

    def lookup(self, url: str, on_day: date):
        if on_day != self._day:
            self._day = on_day
            self._used = 0
        if self._used >= self.daily_quota:
            raise QuotaExceeded(f"{self.provider}: {self.daily_quota} requests/day")
        self._used += 1
        return self._lookup(url)


class JsonLinesReplayClient:
    """Replay a recorded request/response log: one JSON object per line with
    at least {"url": ..., "listed": ...} and an optional "detail"."""

    def __init__(self, provider: str, path):
        import json

        self.provider = provider
        self._responses = {}
        with open(path) as fh:
            for line in fh:
                if not line.strip():
                    continue
                record = json.loads(line)
                self._responses[record["url"]] = record

    def lookup(self, url: str, on_day: date):
        return self._responses.get(url)


def blocklist_check(url: str, provider_client, on_day: date | None = None) -> BlocklistStatus:
    """Query one provider for one URL; no answer records as unlisted."""
    on_day = on_day or date.today()
    try:
        response = provider_client.lookup(url, on_day)
    except QuotaExceeded:
        raise
    except ProviderError:
        raise
    except Exception as exc:  # provider bugs surface as ProviderError
        raise ProviderError(str(exc)) from exc
    if not response or not response.get("listed"):
        return BlocklistStatus(url=url, provider=provider_client.provider,
                               listed=False, checked_at=on_day)
    return BlocklistStatus(
        url=url,
        provider=provider_client.provider,
        listed=True,
        detail=response.get("detail"),
        checked_at=on_day,
    )
