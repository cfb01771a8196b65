"""Hosting-type identification: thresholds, structural heuristics, and the
curated provider table (which always wins over heuristics)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .errors import NoLiveSample

OBJECT_STORAGE = "ObjectStorage"
WEBH_DIFF = "WebhDiff"
WEBH_SAME = "WebhSame"
UNCATEGORIZED = "Uncategorized"
HOSTING_TYPES = (OBJECT_STORAGE, WEBH_DIFF, WEBH_SAME, UNCATEGORIZED)

FQDN_THRESHOLD = 100
PDF_VOLUME_THRESHOLD = 5000

# evidence tokens produced by the structural heuristics
EV_BASE_PATH_403 = "base-path-403"
EV_IDENTIFIER = "identifier-like"
EV_BROWSABLE = "browsable-homepage"
EV_BUCKET_SUBDOMAIN = "bucket-like-subdomain"
EV_MANY_SUBDOMAINS = "many-subdomain-root"


@dataclass(frozen=True)
class ProviderEntry:
    etld1: str
    hosting_type: str
    id_method: str           # threshold | manual | webanalytics
    fqdn_count: int = 0
    url_count: int = 0


@dataclass(frozen=True)
class ProbeSample:
    """One live URL observation used by the structural heuristics."""
    url: str
    fqdn: str
    path: str
    prefix_statuses: dict    # "/" and each path prefix -> HTTP status
    homepage_status: int | None = None
    homepage_content_type: str | None = None


@dataclass(frozen=True)
class Classification:
    etld1: str
    hosting_type: str
    source: str              # "curated" | "heuristic" | "default"
    confidence: str          # "high" | "medium" | "low"


def load_provider_table(path=None) -> dict:
    """Curated entries keyed by eTLD+1; ships with the package by default."""
    if path is None:
        text = resources.files("baitwatch.data").joinpath("providers.tsv").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    table = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        etld1, hosting_type, id_method = parts[0], parts[1], parts[2]
        fqdns = int(parts[3]) if len(parts) > 3 else 0
        urls = int(parts[4]) if len(parts) > 4 else 0
        if etld1 in table:
            raise ValueError(f"duplicate provider entry {etld1}")
        table[etld1] = ProviderEntry(etld1, hosting_type, id_method, fqdns, urls)
    return table


def candidates_by_fqdn(counts: dict, threshold: int = FQDN_THRESHOLD) -> list:
    """eTLD+1s with at least *threshold* distinct FQDNs, most affected first."""
    return [etld1 for etld1, n in
            sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
            if n >= threshold]


def candidates_by_volume(pdf_counts: dict,
                         threshold: int = PDF_VOLUME_THRESHOLD) -> list:
    """eTLD+1s serving at least *threshold* distinct PDF links."""
    return [etld1 for etld1, n in
            sorted(pdf_counts.items(), key=lambda kv: (-kv[1], kv[0]))
            if n >= threshold]


_IDENT_RE = re.compile(r"^[a-z0-9]{10,}$", re.I)


def looks_like_identifier(token: str, min_length: int = 10,
                          allow_letters_only: bool = True) -> bool:
    """High-entropy token rule: >= min_length alphanumeric characters, with a
    digit-and-letter mix preferred; letters-only tokens qualify at the same
    length. Digits-only strings do not qualify."""
    if len(token) < min_length or not _IDENT_RE.match(token):
        return False
    has_digit = any(c.isdigit() for c in token)
    has_alpha = any(c.isalpha() for c in token)
    if has_digit and has_alpha:
        return True
    return allow_letters_only and has_alpha and not has_digit


def structural_heuristics(etld1: str, probe_samples, fqdn_count: int | None = None,
                          fqdn_threshold: int = FQDN_THRESHOLD) -> set:
    """Evidence set for one eTLD+1 from live URL samples."""
    samples = list(probe_samples)
    if not samples:
        raise NoLiveSample(etld1)
    evidence = set()

    prefix_statuses = [st for s in samples for st in s.prefix_statuses.values()]
    if prefix_statuses and all(st == 403 for st in prefix_statuses):
        evidence.add(EV_BASE_PATH_403)

    for sample in samples:
        subdomain = sample.fqdn[: -(len(etld1) + 1)] if \
            sample.fqdn.endswith("." + etld1) else ""
        first_label = subdomain.split(".")[0] if subdomain else ""
        segments = [seg for seg in sample.path.split("/") if seg]
        first_segment = segments[0] if segments else ""
        if looks_like_identifier(first_label):
            evidence.add(EV_IDENTIFIER)
            evidence.add(EV_BUCKET_SUBDOMAIN)
        if looks_like_identifier(first_segment):
            evidence.add(EV_IDENTIFIER)

    for sample in samples:
        if sample.homepage_status == 200 and sample.homepage_content_type \
                and sample.homepage_content_type.startswith("text/html"):
            evidence.add(EV_BROWSABLE)

    if fqdn_count is not None and fqdn_count >= fqdn_threshold:
        evidence.add(EV_MANY_SUBDOMAINS)
    return evidence


def classify(etld1: str, curated: dict, evidence: set) -> str:
    return classify_full(etld1, curated, evidence).hosting_type


def classify_full(etld1: str, curated: dict, evidence: set) -> Classification:
    """Curated entry wins; otherwise evidence maps to a type, else Uncategorized."""
    entry = curated.get(etld1)
    if entry is not None:
        return Classification(etld1, entry.hosting_type, "curated", "high")
    if EV_BASE_PATH_403 in evidence and EV_IDENTIFIER in evidence:
        return Classification(etld1, WEBH_DIFF, "heuristic", "medium")
    if EV_IDENTIFIER in evidence and EV_BUCKET_SUBDOMAIN in evidence \
            and EV_BROWSABLE not in evidence:
        return Classification(etld1, OBJECT_STORAGE, "heuristic", "medium")
    if EV_BROWSABLE in evidence and EV_MANY_SUBDOMAINS in evidence:
        return Classification(etld1, WEBH_SAME, "heuristic", "medium")
    return Classification(etld1, UNCATEGORIZED, "default", "low")


def distribution_report(hosting_by_etld1: dict, cluster_rows) -> dict:
    """Cluster x hosting-type matrices by distinct FQDNs and by PDF count.

    cluster_rows: iterable of (sha256, fqdn, etld1, cluster_label).
    """
    by_fqdn: dict = {}
    by_pdf: dict = {}
    fqdn_seen: dict = {}
    for sha256, fqdn, etld1, label in cluster_rows:
        hosting = hosting_by_etld1.get(etld1, UNCATEGORIZED)
        row = by_pdf.setdefault(label, {h: 0 for h in HOSTING_TYPES})
        row[hosting] += 1
        seen = fqdn_seen.setdefault(label, set())
        if (fqdn, hosting) not in seen:
            seen.add((fqdn, hosting))
            frow = by_fqdn.setdefault(label, {h: 0 for h in HOSTING_TYPES})
            frow[hosting] += 1
    return {"by_fqdn": by_fqdn, "by_pdf": by_pdf}
