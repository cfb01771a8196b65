"""AS-level aggregation: rank autonomous systems by FQDN and PDF volume."""

from __future__ import annotations

import re
from pathlib import Path


def load_alias_map(path) -> list:
    """Read `pattern<TAB>canonical` rows; patterns are regexes, first hit wins."""
    entries = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        pattern, _, canonical = line.partition("\t")
        entries.append((re.compile(pattern.strip(), re.I), canonical.strip()))
    return entries


def canonical_as_name(name: str, alias_map) -> str:
    for pattern, canonical in alias_map or []:
        if pattern.search(name):
            return canonical
    return name


def as_tables(records, pdf_counts, alias_map=None):
    """Two ranked tables: ASes by distinct FQDN count and by PDF count.

    records: HostRecords (entries without an ASN are skipped);
    pdf_counts: fqdn -> number of distinct PDF links observed there.
    AS names of the same company merge through the alias map before counting.
    """
    fqdns_per_as: dict = {}
    pdfs_per_as: dict = {}
    for rec in records:
        if rec.asn is None or rec.as_name is None:
            continue
        name = canonical_as_name(rec.as_name, alias_map)
        fqdns_per_as.setdefault(name, set()).add(rec.fqdn)
        pdfs_per_as[name] = pdfs_per_as.get(name, 0) + pdf_counts.get(rec.fqdn, 0)
    by_fqdn = sorted(
        ((name, len(fqdns)) for name, fqdns in fqdns_per_as.items()),
        key=lambda row: (-row[1], row[0]),
    )
    by_pdf = sorted(pdfs_per_as.items(), key=lambda row: (-row[1], row[0]))
    return by_fqdn, by_pdf
