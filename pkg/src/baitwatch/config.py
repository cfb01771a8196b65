"""Pipeline configuration: defaults, key=value files, and environment overrides.

Defaults mirror the numeric constants the rest of the pipeline is calibrated
to; a constants test pins them. File format is one `key=value` per line with
`#` comments. Any key can be overridden by an environment variable named
`PCF_<KEY_UPPERCASED>` (dots become underscores).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError

ENV_PREFIX = "PCF_"


@dataclass
class PipelineConfig:
    # admission thresholds
    seo_min_links: int = 5
    seo_min_mean: float = 1.0
    # hosting candidate thresholds
    fqdn_threshold: int = 100
    pdf_volume_threshold: int = 5000
    # clustering
    cluster_eps0: float = 0.25
    cluster_eps_step: float = 0.01
    cluster_min_pts: int = 4
    # embedding/metric-learning margin (shared with the secondary trainer)
    triplet_margin: float = 0.2
    # probe retirement
    offline_days: int = 3
    # ioc scanner
    resample_n: int = 20
    path_group_sample: int = 10
    prune_window_days: int = 14
    capture_wait_seconds: int = 15
    # rate limits
    per_host_rps: float = 1.0
    vt_daily_quota: int = 4000
    # vantage points: first entry is the primary
    vantages: tuple = ("primary",)
    # seeds
    seed: int = 1789
    # paths
    store_dir: str = "store"
    outbox_dir: str = "outbox"
    raster_dir: str = "rasters"
    pdf_dir: str = "pdfs"
    renderer_cmd: str = "pdf-raster"
    as_alias_file: str = ""
    providers_file: str = ""
    # outgoing identification
    contact_url: str = "https://example.org/research"
    study_purpose: str = "web-abuse measurement study"
    notify_sender: str = "research@example.org"
    notify_institution: str = "Example Institute"
    notify_country: str = "Example Country"

    def resolve(self, base: Path) -> "PipelineConfig":
        """Return a copy with relative paths anchored at *base*."""
        updated = {}
        for name in ("store_dir", "outbox_dir", "raster_dir", "pdf_dir"):
            value = getattr(self, name)
            if value and not os.path.isabs(value):
                updated[name] = str(base / value)
        return replace_fields(self, updated)

    def user_agent(self) -> str:
        return (
            f"baitwatch/0.1 ({self.study_purpose}; "
            f"contact: {self.contact_url}; opt-out supported)"
        )

    def vantage_names(self) -> list:
        """Vantage list entries are `name` or `name=proxy-url`."""
        return [entry.partition("=")[0] for entry in self.vantages]

    def vantage_proxies(self) -> dict:
        proxies = {}
        for entry in self.vantages:
            name, _, proxy = entry.partition("=")
            if proxy:
                proxies[name] = proxy
        return proxies


def replace_fields(cfg: PipelineConfig, updates: dict) -> PipelineConfig:
    values = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    values.update(updates)
    return PipelineConfig(**values)


def _coerce(name: str, raw: str, current):
    try:
        if isinstance(current, bool):
            return raw.lower() in ("1", "true", "yes", "on")
        if isinstance(current, int):
            return int(raw)
        if isinstance(current, float):
            return float(raw)
        if isinstance(current, tuple):
            return tuple(part.strip() for part in raw.split(",") if part.strip())
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc


def load_config(path: str | Path | None = None, env: dict | None = None) -> PipelineConfig:
    """Build a config from defaults, an optional key=value file, then env vars."""
    cfg = PipelineConfig()
    known = {f.name for f in fields(cfg)}
    updates: dict = {}

    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        for lineno, line in enumerate(path.read_text().splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, _, raw = line.partition("=")
            key = key.strip()
            if key not in known:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            updates[key] = _coerce(key, raw.strip(), getattr(cfg, key))

    environ = os.environ if env is None else env
    for key, raw in environ.items():
        if not key.startswith(ENV_PREFIX):
            continue
        name = key[len(ENV_PREFIX):].lower()
        if name in known:
            updates[name] = _coerce(name, raw, getattr(cfg, name))

    cfg = replace_fields(cfg, updates)
    _validate(cfg)
    return cfg


def _validate(cfg: PipelineConfig) -> None:
    positive = (
        "seo_min_links", "seo_min_mean", "fqdn_threshold", "pdf_volume_threshold",
        "cluster_eps0", "cluster_eps_step", "cluster_min_pts", "triplet_margin",
        "offline_days", "resample_n", "path_group_sample", "per_host_rps",
        "vt_daily_quota",
    )
    for name in positive:
        if getattr(cfg, name) <= 0:
            raise ConfigError(f"{name} must be positive")
    if not cfg.vantages:
        raise ConfigError("at least one vantage point is required")
