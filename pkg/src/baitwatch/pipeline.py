"""Daily pipeline: stage DAG, ingestion, and idempotent per-day execution.

Stage order is ingest -> probe -> netmeta -> hosting -> ioc. A failed stage
skips its dependents; independent branches still run. Clustering and
notification are operator-invoked, not daily stages.
"""

from __future__ import annotations

import hashlib
import logging
import os
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from .config import PipelineConfig
from .errors import (
    EncryptedPdf,
    MalformedPdf,
    NxDomain,
    StageFailure,
    TransportError,
    WhoisUnavailable,
)
from .hosting import (
    candidates_by_fqdn,
    candidates_by_volume,
    classify_full,
    load_provider_table,
)
from .ioc import bucket_from_url, match_path_indicators
from .netmeta import enrich
from .netmeta.urlsplit import split_url
from .pdfscan import parse_pdf, seo_metric
from .pdfscan.seo import is_pdf_link
from .probe import BodyStore, run_probe_day
from .store import DatasetEntry, EventStore

logger = logging.getLogger(__name__)

STAGES = ("ingest", "probe", "netmeta", "hosting", "ioc")
DEPENDENCIES = {
    "ingest": (),
    "probe": ("ingest",),
    "netmeta": ("ingest",),
    "hosting": ("netmeta",),
    "ioc": ("probe", "hosting"),
}


@dataclass
class StageResult:
    name: str
    status: str               # "ok" | "failed" | "skipped"
    detail: str = ""


class NullTransport:
    """Placeholder transport: every probe surfaces as a transport failure."""

    def head(self, url, vantage):
        raise TransportError("no probe transport configured")

    def get(self, url, vantage):
        raise TransportError("no probe transport configured")


def _null_resolver(fqdn):
    raise NxDomain(f"no resolver configured for {fqdn}")


def _null_whois(ip):
    raise WhoisUnavailable("no whois client configured")


@dataclass
class PipelineEnv:
    """Pluggable externals; tests inject fixtures, the service wires live ones."""
    transport: object = field(default_factory=NullTransport)
    resolver: object = _null_resolver
    whois: object = _null_whois
    storage_client: object = None
    vuln_db: object = None
    ingest_paths: list | None = None


class PipelineLock:
    def __init__(self, store_dir):
        self.path = Path(store_dir) / ".lock"

    def __enter__(self):
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise StageFailure(f"pipeline already running (lock {self.path})")
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        return self

    def __exit__(self, *exc):
        self.path.unlink(missing_ok=True)
        return False


def ingest(store: EventStore, pdf_paths, day: date, config: PipelineConfig,
           source: str = "seed") -> dict:
    """Parse PDFs, gate them on the admission metric, register backlinks.

    Parse errors are collected per file, never fatal. Documents failing the
    metric are recorded (audited) but contribute no monitored URLs.
    """
    from .probe import Registry

    registry = Registry(store, offline_days=config.offline_days)
    summary = {"documents": 0, "passed": 0, "registered_urls": 0,
               "duplicates": 0, "renewed_urls": 0, "errors": []}
    for path in pdf_paths:
        path = Path(path)
        try:
            data = path.read_bytes()
            doc = parse_pdf(data)
        except (OSError, MalformedPdf, EncryptedPdf) as exc:
            summary["errors"].append(f"{path.name}: {exc}")
            store.append_record("ingest_errors",
                                {"file": path.name, "error": str(exc),
                                 "day": day.isoformat()})
            continue
        summary["documents"] += 1
        verdict = seo_metric(doc, config.seo_min_links, config.seo_min_mean)
        entry = store.add_dataset_entry(DatasetEntry(
            sha256=doc.sha256, source=source, first_seen=day,
            seo_verdict=verdict.passes,
        ))
        if entry.first_seen != day:
            summary["duplicates"] += 1
        if not verdict.passes:
            if not store.has_record("seo_audit", sha256=doc.sha256):
                store.append_record("seo_audit", {
                    "sha256": doc.sha256, "day": day.isoformat(),
                    "total_pdf_links": verdict.total_pdf_links,
                    "mean_links_per_page": verdict.mean_links_per_page,
                })
            continue
        summary["passed"] += 1
        for link in doc.links:
            if not is_pdf_link(link.url):
                continue
            if store.register_url(link.url, day):
                summary["registered_urls"] += 1
            elif registry.state(link.url).retired:
                # a fresh backlink to a retired URL restarts monitoring as a
                # new incarnation; the old history stays linked on record
                previous = store.registered_urls()[link.url]
                store.renew_url(link.url, day)
                store.append_record("renewals", {
                    "url": link.url, "renewed_on": day.isoformat(),
                    "previous_first_seen": previous.isoformat(),
                    "source_sha256": doc.sha256,
                })
                summary["renewed_urls"] += 1
    return summary


def _stage_ingest(store, day, config, env):
    paths = env.ingest_paths
    if paths is None:
        inbox = Path(config.store_dir).parent / "inbox"
        paths = sorted(inbox.glob("*.pdf")) if inbox.exists() else []
    if not paths:
        return "no documents to ingest"
    summary = ingest(store, paths, day, config)
    return (f"{summary['documents']} parsed, {summary['passed']} passed, "
            f"{summary['registered_urls']} urls registered")


def _stage_probe(store, day, config, env):
    body_store = BodyStore(config.pdf_dir)
    counts = run_probe_day(
        store, day, env.transport, config.vantage_names(), body_store,
        offline_days=config.offline_days, per_host_rps=config.per_host_rps,
    )
    return ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))


def _stage_netmeta(store, day, config, env):
    known = {rec["fqdn"] for rec in store.iter_records("hosts")}
    added = 0
    for url in store.registered_urls():
        try:
            fqdn = split_url(url).fqdn
        except Exception:
            continue
        if fqdn in known:
            continue
        record = enrich(fqdn, env.resolver, env.whois, on_day=day)
        store.append_record("hosts", {
            "fqdn": record.fqdn, "etld1": record.etld1, "ip": record.ip,
            "asn": record.asn, "as_name": record.as_name,
            "whois_contacts": record.whois_contacts,
            "lookups_at": day.isoformat(),
        })
        known.add(fqdn)
        added += 1
    return f"{added} hosts enriched"


def domain_counts(store) -> tuple:
    """(distinct FQDNs per eTLD+1, distinct pdf links per eTLD+1)."""
    fqdns: dict = {}
    urls: dict = {}
    for url in store.registered_urls():
        try:
            parts = split_url(url)
        except Exception:
            continue
        fqdns.setdefault(parts.etld1, set()).add(parts.fqdn)
        urls[parts.etld1] = urls.get(parts.etld1, 0) + 1
    return {k: len(v) for k, v in fqdns.items()}, urls


def _stage_hosting(store, day, config, env):
    curated = load_provider_table(config.providers_file or None)
    fqdn_counts, url_counts = domain_counts(store)
    flagged = set(candidates_by_fqdn(fqdn_counts, config.fqdn_threshold)) | \
        set(candidates_by_volume(url_counts, config.pdf_volume_threshold))
    lines = []
    for etld1 in sorted(set(fqdn_counts) | set(curated)):
        full = classify_full(etld1, curated, set())
        lines.append("\t".join((
            etld1, full.hosting_type, full.source, full.confidence,
            "candidate" if etld1 in flagged else "-",
            str(fqdn_counts.get(etld1, 0)), str(url_counts.get(etld1, 0)),
        )))
    out = Path(config.store_dir) / "index"
    out.mkdir(exist_ok=True)
    (out / "hosting.tsv").write_text("\n".join(lines) + ("\n" if lines else ""))
    return f"{len(lines)} domains classified, {len(flagged)} candidates"


def _stage_ioc(store, day, config, env):
    added = 0
    for url in store.registered_urls():
        for indicator in match_path_indicators(url):
            if store.has_record("ioc", url=url, indicator=indicator):
                continue
            store.append_record("ioc", {
                "kind": "PathIndicator", "indicator": indicator, "url": url,
                "day": day.isoformat(),
            })
            added += 1
        try:
            bucket = bucket_from_url(url)
        except Exception:
            continue
        if not store.has_record("buckets", bucket=bucket):
            store.append_record("buckets", {"bucket": bucket, "url": url,
                                            "day": day.isoformat()})
    return f"{added} path indicators recorded"


_STAGE_FUNCS = {
    "ingest": _stage_ingest,
    "probe": _stage_probe,
    "netmeta": _stage_netmeta,
    "hosting": _stage_hosting,
    "ioc": _stage_ioc,
}


def run_day(config: PipelineConfig, day: date, env: PipelineEnv | None = None,
            store: EventStore | None = None) -> list:
    """Execute the daily stage DAG; per-stage idempotence makes reruns safe."""
    env = env or PipelineEnv()
    store = store or EventStore(config.store_dir)
    results: dict = {}
    with PipelineLock(config.store_dir):
        for name in STAGES:
            failed_dep = any(
                results[dep].status in ("failed", "skipped")
                for dep in DEPENDENCIES[name]
            )
            if failed_dep:
                results[name] = StageResult(name, "skipped",
                                            "dependency did not complete")
                continue
            try:
                detail = _STAGE_FUNCS[name](store, day, config, env)
                results[name] = StageResult(name, "ok", detail or "")
            except Exception as exc:
                logger.exception("stage %s failed", name)
                results[name] = StageResult(name, "failed", str(exc))
        store.write_indexes()
    return [results[name] for name in STAGES]


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
