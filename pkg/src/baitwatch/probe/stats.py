"""Uptime statistics: per-hosting-type distributions and per-domain spans."""

from __future__ import annotations

from ..errors import NoOnlineObservation
from ..netmeta.urlsplit import split_url

UNCATEGORIZED = "Uncategorized"


def _percentile(sorted_values, q: float):
    if not sorted_values:
        return 0
    idx = (len(sorted_values) - 1) * q
    lo = int(idx)
    hi = min(lo + 1, len(sorted_values) - 1)
    frac = idx - lo
    return sorted_values[lo] * (1 - frac) + sorted_values[hi] * frac


def uptime_report(store, hosting_map: dict) -> dict:
    """Uptime distribution per hosting type plus extended lifetime per eTLD+1.

    hosting_map: etld1 -> hosting type name; unknown domains fall into
    Uncategorized.
    """
    per_type: dict = {}
    for url in store.urls():
        try:
            etld1 = split_url(url).etld1
        except Exception:
            etld1 = None
        hosting = hosting_map.get(etld1, UNCATEGORIZED)
        per_type.setdefault(hosting, []).append(store.uptime_days(url))

    uptime = {}
    for hosting, values in sorted(per_type.items()):
        values.sort()
        uptime[hosting] = {
            "urls": len(values),
            "mean": sum(values) / len(values),
            "median": _percentile(values, 0.5),
            "p90": _percentile(values, 0.9),
            "min": values[0],
            "max": values[-1],
        }

    lifetime = {}
    for etld1 in store.etld1s():
        try:
            lifetime[etld1] = store.extended_lifetime(etld1)
        except NoOnlineObservation:
            lifetime[etld1] = 0
    return {"uptime_by_hosting_type": uptime, "extended_lifetime_by_etld1": lifetime}
