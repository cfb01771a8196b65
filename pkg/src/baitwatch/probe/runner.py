"""Daily probe pass: schedule, probe, recheck offline URLs, record events."""

from __future__ import annotations

import logging
from datetime import date

from ..errors import TransportError
from ..store import ProbeEvent
from .protocol import OFFLINE_VERDICT, ONLINE_VERDICT, probe_once
from .state import Registry, schedule

logger = logging.getLogger(__name__)


def _alternate_vantage(vantages, primary):
    for v in vantages:
        if v != primary:
            return v
    return None


def run_probe_day(store, day: date, transport, vantages, body_store=None,
                  offline_days: int = 3, per_host_rps: float = 1.0) -> dict:
    """Probe every active URL once; one alternate-vantage recheck per offline
    day before it is finalized. Transport failures leave the day unknown.

    Already-probed (url, day) pairs are skipped so reruns are idempotent.
    """
    registry = Registry(store, offline_days=offline_days, body_store=body_store)
    primary = vantages[0]
    alternate = _alternate_vantage(vantages, primary)
    counts = {"probed": 0, "online": 0, "offline": 0, "unknown": 0, "skipped": 0}

    for url, _fqdn, _not_before in schedule(day, registry, per_host_rps):
        if store.day_status(url, day) is not None:
            counts["skipped"] += 1
            continue
        outcomes = []
        try:
            outcomes.append(probe_once(url, primary, transport, body_store))
        except TransportError as exc:
            logger.warning("transport failure for %s via %s: %s", url, primary, exc)
        if outcomes and outcomes[-1].verdict == OFFLINE_VERDICT and alternate:
            try:
                outcomes.append(probe_once(url, alternate, transport, body_store))
            except TransportError as exc:
                logger.warning("transport failure for %s via %s: %s",
                               url, alternate, exc)
        if not outcomes:
            counts["unknown"] += 1
            continue
        for outcome in outcomes:
            store.append_probe(ProbeEvent(
                url=url, day=day, status=outcome.verdict,
                vantage=outcome.vantage, reason=outcome.reason,
            ))
        counts["probed"] += 1
        if any(o.verdict == ONLINE_VERDICT for o in outcomes):
            counts["online"] += 1
        else:
            counts["offline"] += 1
    return counts
