"""Per-URL monitoring state: daily verdict folding, retirement, scheduling."""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import date

from ..errors import AlreadyRetired
from ..netmeta.urlsplit import split_url
from .protocol import ONLINE_VERDICT

RETIRE_AFTER = 3   # consecutive offline days


@dataclass(frozen=True)
class MonitoredUrl:
    url: str
    first_seen: date
    consecutive_offline: int = 0
    retired: bool = False
    stored_body_digest: str | None = None


def advance_day(state: MonitoredUrl, outcomes, offline_days: int = RETIRE_AFTER
                ) -> MonitoredUrl:
    """Fold one day of (possibly multi-vantage) outcomes into the state.

    The day counts Online when any vantage saw Online; an all-offline day
    bumps the counter and retires the URL at the threshold.
    """
    if state.retired:
        raise AlreadyRetired(state.url)
    if not outcomes:
        raise ValueError("advance_day needs at least one outcome")
    if any(o.verdict == ONLINE_VERDICT for o in outcomes):
        return replace(state, consecutive_offline=0)
    count = state.consecutive_offline + 1
    return replace(state, consecutive_offline=count,
                   retired=count >= offline_days)


def schedule(day: date, registry, per_host_rps: float = 1.0):
    """All non-retired URLs due on *day*, bucketed per FQDN.

    Returns (url, fqdn, not_before_seconds) triples; entries on the same
    FQDN carry increasing spacing metadata honoring the per-host rate limit.
    """
    spacing = 1.0 / per_host_rps
    counters: dict = {}
    due = []
    for state in registry.active(day):
        try:
            fqdn = split_url(state.url).fqdn
        except Exception:
            fqdn = state.url
        slot = counters.get(fqdn, 0)
        counters[fqdn] = slot + 1
        due.append((state.url, fqdn, slot * spacing))
    return due


class Registry:
    """Monitored-URL registry backed by the event store.

    Counters and retirement are replayed from the store's day verdicts, so
    the registry never persists state of its own.
    """

    def __init__(self, store, offline_days: int = RETIRE_AFTER, body_store=None):
        self.store = store
        self.offline_days = offline_days
        self.body_store = body_store

    def register(self, url: str, first_seen: date) -> bool:
        return self.store.register_url(url, first_seen)

    def state(self, url: str) -> MonitoredUrl:
        first_seen = self.store.registered_urls().get(url)
        digest = self.body_store.digest(url) if self.body_store else None
        state = MonitoredUrl(url=url, first_seen=first_seen or date.min,
                             stored_body_digest=digest)
        count = 0
        for day in self.store.days_for(url):
            if first_seen is not None and day < first_seen:
                continue  # history before a renewal belongs to the old state
            if self.store.day_status(url, day) == ONLINE_VERDICT:
                count = 0
            else:
                count += 1
                if count >= self.offline_days:
                    return replace(state, consecutive_offline=count, retired=True)
        return replace(state, consecutive_offline=count)

    def active(self, day: date):
        out = []
        for url, first_seen in sorted(self.store.registered_urls().items()):
            if first_seen > day:
                continue
            state = self.state(url)
            if not state.retired:
                out.append(state)
        return out
