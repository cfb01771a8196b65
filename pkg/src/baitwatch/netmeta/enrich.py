"""DNS/WHOIS enrichment of FQDNs into host records.

Resolver and WHOIS clients are pluggable callables so the pipeline can run
against live services, recorded fixtures, or replay files interchangeably.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import date

from ..errors import NxDomain, WhoisUnavailable
from .urlsplit import SuffixRules, default_rules

EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")
ASN_RES = [
    re.compile(r"^origin(?:as)?\s*:\s*AS?(\d+)", re.I | re.M),
    re.compile(r"^aut-num\s*:\s*AS(\d+)", re.I | re.M),
    re.compile(r"^OriginAS\s*:\s*AS(\d+)", re.I | re.M),
]
AS_NAME_RES = [
    re.compile(r"^as-?name\s*:\s*(.+)$", re.I | re.M),
    re.compile(r"^ASName\s*:\s*(.+)$", re.I | re.M),
    re.compile(r"^netname\s*:\s*(.+)$", re.I | re.M),
]

# Per-registry quirks: tried before the generic patterns when the record
# names its source.
PROVIDER_OVERRIDES = {
    "arin": [re.compile(r"^OriginAS\s*:\s*AS(\d+)", re.M)],
    "ripe": [re.compile(r"^origin\s*:\s*AS(\d+)", re.I | re.M)],
}


@dataclass
class HostRecord:
    fqdn: str
    etld1: str
    ip: str | None = None
    asn: int | None = None
    as_name: str | None = None
    whois_contacts: list = field(default_factory=list)
    lookups_at: date | None = None


def extract_emails(text: str) -> list:
    """Emails in document order, deduplicated case-insensitively."""
    seen = set()
    out = []
    for match in EMAIL_RE.finditer(text):
        email = match.group(0)
        key = email.lower()
        if key not in seen:
            seen.add(key)
            out.append(email)
    return out


def _extract_asn(text: str) -> int | None:
    lowered = text.lower()
    for registry, patterns in PROVIDER_OVERRIDES.items():
        if registry in lowered:
            for pat in patterns:
                m = pat.search(text)
                if m:
                    return int(m.group(1))
    for pat in ASN_RES:
        m = pat.search(text)
        if m:
            return int(m.group(1))
    return None


def _extract_as_name(text: str) -> str | None:
    for pat in AS_NAME_RES:
        m = pat.search(text)
        if m:
            return m.group(1).strip()
    return None


def enrich(fqdn, resolver, whois_client, on_day: date | None = None,
           rules: SuffixRules | None = None) -> HostRecord:
    """Resolve the A record, fetch WHOIS by IP, and parse ASN + contacts.

    NXDOMAIN and WHOIS outages degrade to absent fields rather than failing
    the record.
    """
    rules = rules or default_rules()
    suffix = rules.public_suffix(fqdn)
    etld1 = fqdn if fqdn == suffix else (
        fqdn[: -(len(suffix) + 1)].split(".")[-1] + "." + suffix
    )
    record = HostRecord(fqdn=fqdn, etld1=etld1, lookups_at=on_day or date.today())
    try:
        record.ip = resolver(fqdn)
    except NxDomain:
        return record
    try:
        text = whois_client(record.ip)
    except WhoisUnavailable:
        return record
    record.asn = _extract_asn(text)
    record.as_name = _extract_as_name(text)
    record.whois_contacts = extract_emails(text)
    return record
