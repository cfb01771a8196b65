"""Version-fingerprint scanning: planning, extraction, ordering, pruning."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from datetime import date
from importlib import resources
from urllib.parse import urlsplit

from ..errors import UnknownComponent

PATH_GROUP_SAMPLE = 10
PRUNE_WINDOW_DAYS = 14

# per-component patterns tried in order; group 1 is the version
VERSION_PATTERNS = {
    "FCKEditor": [
        re.compile(r"FCKeditorAPI\s*=\s*\{\s*Version\s*:\s*'([0-9][0-9.]*)'"),
        re.compile(r"FCKeditor[^0-9\n]{0,40}?([0-9]+(?:\.[0-9]+){1,3})", re.I),
    ],
    "CKEditor": [
        re.compile(r"CKEDITOR[^\n]{0,80}?version\s*[:=]\s*[\"']([0-9][0-9.]*)", re.I),
        re.compile(r"CKEditor\s+([0-9]+(?:\.[0-9]+){1,3})", re.I),
    ],
    "CKFinder": [
        re.compile(r"CKFinder[^0-9\n]{0,40}?([0-9]+(?:\.[0-9]+){1,3})", re.I),
        re.compile(r"version\s*[:=]\s*[\"']([0-9][0-9.]*)[\"']", re.I),
    ],
    "KCFinder": [
        re.compile(r"KCFinder\s+([0-9]+(?:\.[0-9]+){1,3})", re.I),
        re.compile(r"version\s*=\s*[\"']([0-9][0-9.]*)[\"']", re.I),
    ],
    "SLiMS": [
        re.compile(r"SLiMS\s+([0-9]+(?:\.[0-9]+){0,3})", re.I),
        re.compile(r"senayan([0-9]+(?:\.[0-9]+){0,3})", re.I),
    ],
    "E-Learning Madrasah": [
        re.compile(r"e-?learning\s+madrasah[^0-9\n]{0,30}?([0-9]+(?:\.[0-9]+){0,3})", re.I),
        re.compile(r"CKFinder[^0-9\n]{0,40}?([0-9]+(?:\.[0-9]+){1,3})", re.I),
    ],
}


def extract_version(body: str, component: str) -> str | None:
    """First version capture for the component's pattern list, if any."""
    if not body:
        return None
    for pattern in VERSION_PATTERNS.get(component, ()):
        match = pattern.search(body)
        if match:
            return match.group(1)
    return None


# --- ordering ---

_CHUNK_RE = re.compile(r"^(\d*)(.*)$")


def version_key(version: str) -> list:
    """Dot-separated numeric segments; non-numeric suffixes ride along."""
    parts = []
    for chunk in version.strip().split("."):
        m = _CHUNK_RE.match(chunk.strip())
        num = int(m.group(1)) if m.group(1) else 0
        parts.append((num, m.group(2).strip().lower()))
    return parts


def _suffix_rank(suffix: str):
    # a release (empty suffix) sorts after any pre-release suffix
    return (1, "") if suffix == "" else (0, suffix)


def version_less(a: str, b: str) -> bool:
    ka, kb = version_key(a), version_key(b)
    width = max(len(ka), len(kb))
    ka += [(0, "")] * (width - len(ka))
    kb += [(0, "")] * (width - len(kb))
    for (na, sa), (nb, sb) in zip(ka, kb):
        if na != nb:
            return na < nb
        ra, rb = _suffix_rank(sa), _suffix_rank(sb)
        if ra != rb:
            return ra < rb
    return False


def check_outdated(component, catalog: dict) -> bool:
    """True iff the observed version precedes the latest known release."""
    if component.version is None:
        raise ValueError(f"{component.name}: no observed version")
    latest = catalog.get(component.name)
    if latest is None:
        raise UnknownComponent(component.name)
    return version_less(component.version, latest)


# --- scan planning ---

@dataclass(frozen=True)
class ScanTarget:
    fqdn: str
    path_group: str
    component: str
    location: str
    probe_url: str


def load_location_catalog(path=None) -> list:
    """(component, location) rows of candidate version-file locations."""
    if path is None:
        text = resources.files("baitwatch.data").joinpath("ioc-locations.tsv").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    catalog = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        component, location = line.split("\t")
        catalog.append((component, location))
    return catalog


def plan_version_scan(urls, catalog, seed: int,
                      sample_size: int = PATH_GROUP_SAMPLE) -> list:
    """Group URLs by directory path, sample FQDNs per group, emit probes.

    The directory path (all segments except the file name) groups hosts that
    share a server-side component layout; per group at most *sample_size*
    FQDNs are scanned against every catalog location.
    """
    groups: dict = {}
    origin: dict = {}
    for url in urls:
        try:
            parts = urlsplit(url)
        except ValueError:
            continue
        if not parts.hostname:
            continue
        directory = parts.path.rsplit("/", 1)[0] + "/"
        fqdn = parts.hostname.lower()
        groups.setdefault(directory, set()).add(fqdn)
        origin.setdefault(fqdn, f"{parts.scheme}://{fqdn}")
    targets = []
    rng = random.Random(seed)
    for directory in sorted(groups):
        fqdns = sorted(groups[directory])
        if len(fqdns) > sample_size:
            fqdns = sorted(rng.sample(fqdns, sample_size))
        for fqdn in fqdns:
            for component, location in catalog:
                targets.append(ScanTarget(
                    fqdn=fqdn, path_group=directory, component=component,
                    location=location,
                    probe_url=f"{origin[fqdn]}/{location}",
                ))
    return targets


def execute_scan(targets, transport, ledger=None, on_day: date | None = None) -> list:
    """Fetch every planned location through a guarded transport and extract
    versions. Returns (target, version) for each hit; failures and misses
    feed the ledger so the pruning pass can shrink the catalog."""
    hits = []
    for target in targets:
        try:
            status, _headers, body = transport.request("GET", target.probe_url)
        except Exception:
            continue
        version = None
        if status == 200 and body:
            text = body.decode("latin-1") if isinstance(body, bytes) else body
            version = extract_version(text, target.component)
        if ledger is not None and on_day is not None:
            ledger.record_scan(target.location, on_day, version is not None)
        if version is not None:
            hits.append((target, version))
    return hits


# --- catalog pruning ---

@dataclass
class ScanLedger:
    """Per-location scan history feeding the zero-match pruning rule."""
    first_scanned: dict = field(default_factory=dict)
    last_scanned: dict = field(default_factory=dict)
    matches: dict = field(default_factory=dict)

    def record_scan(self, location: str, day: date, matched: bool) -> None:
        self.first_scanned.setdefault(location, day)
        self.last_scanned[location] = day
        if matched:
            self.matches[location] = self.matches.get(location, 0) + 1


def prune_catalog(catalog, ledger: ScanLedger,
                  window_days: int = PRUNE_WINDOW_DAYS) -> list:
    """Drop locations scanned over a full window without a single match."""
    kept = []
    for component, location in catalog:
        first = ledger.first_scanned.get(location)
        last = ledger.last_scanned.get(location)
        if first is not None and last is not None \
                and (last - first).days >= window_days \
                and ledger.matches.get(location, 0) == 0:
            continue
        kept.append((component, location))
    return kept
