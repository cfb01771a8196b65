"""CPE construction and vulnerability-database matching."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DbUnavailable, NoVendorMapping
from .versions import version_less

# component name (lowercased) -> CPE vendor
VENDOR_MAP = {
    "ckfinder": "cksource",
    "ckeditor": "cksource",
    "fckeditor": "fckeditor",
    "kcfinder": "kcfinder_project",
    "slims": "slims",
    "e-learning madrasah": "kemenag",
    "wordpress": "wordpress",
    "joomla": "joomla",
    "drupal": "drupal",
    "woocommerce": "automattic",
    "easydigitaldownloads": "easydigitaldownloads",
    "magento": "magento",
    "php": "php",
    "apache": "apache",
    "nginx": "nginx",
    "iis": "microsoft",
    "litespeed": "litespeedtech",
    "plesk": "plesk",
    "formcraft": "formcraft",
    "webform": "drupal",
    "yoast seo": "yoast",
    "astra": "brainstormforce",
    "revslider": "themepunch",
}

UFU_CLASS = "Unrestricted File Upload"


@dataclass(frozen=True)
class CveRecord:
    cve_id: str
    weakness: str
    affected_until: str | None = None   # inclusive upper bound of affected versions


@dataclass(frozen=True)
class VulnReport:
    cpe: str
    records: tuple
    ufu: tuple

    @property
    def vulnerable(self) -> bool:
        return bool(self.records)


def cpe_identifier(component) -> str:
    vendor = VENDOR_MAP.get(component.name.lower())
    if vendor is None:
        raise NoVendorMapping(component.name)
    product = component.name.lower().replace(" ", "_")
    version = component.version or "*"
    return f"cpe:2.3:a:{vendor}:{product}:{version}:*:*:*:*:*:*:*"


def _applies(record: CveRecord, version: str | None) -> bool:
    if record.affected_until is None or version is None:
        return True
    return version == record.affected_until \
        or version_less(version, record.affected_until)


def cpe_and_vulns(component, vuln_db_client) -> VulnReport:
    """Known CVEs affecting the observed version, with the UFU subset."""
    cpe = cpe_identifier(component)
    try:
        candidates = vuln_db_client.query(cpe)
    except NoVendorMapping:
        raise
    except Exception as exc:
        raise DbUnavailable(str(exc)) from exc
    records = tuple(r for r in candidates if _applies(r, component.version))
    ufu = tuple(r for r in records if r.weakness == UFU_CLASS)
    return VulnReport(cpe=cpe, records=records, ufu=ufu)


class JsonLinesVulnDb:
    """Replayable fixture database: records keyed by vendor:product."""

    def __init__(self, entries=None):
        self._by_product: dict = {}
        for entry in entries or ():
            key = entry["product"]
            records = tuple(CveRecord(r["cve_id"], r["weakness"],
                                      r.get("affected_until"))
                            for r in entry["records"])
            self._by_product[key] = records

    @classmethod
    def from_file(cls, path):
        import json

        with open(path) as fh:
            return cls(json.loads(line) for line in fh if line.strip())

    def query(self, cpe: str):
        parts = cpe.split(":")
        key = f"{parts[3]}:{parts[4]}"
        return self._by_product.get(key, ())
