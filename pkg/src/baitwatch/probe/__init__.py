from .protocol import (
    OFFLINE_VERDICT,
    ONLINE_VERDICT,
    BodyStore,
    HttpxTransport,
    ProbeOutcome,
    probe_once,
)
from .state import MonitoredUrl, Registry, advance_day, schedule
from .runner import run_probe_day
from .stats import uptime_report

__all__ = [
    "ONLINE_VERDICT", "OFFLINE_VERDICT",
    "BodyStore", "HttpxTransport", "ProbeOutcome", "probe_once",
    "MonitoredUrl", "Registry", "advance_day", "schedule",
    "run_probe_day", "uptime_report",
]
