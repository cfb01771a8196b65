from .pathind import match_path_indicators
from .fingerprint import FingerprintRule, SoftwareComponent, fingerprint, load_rules
from .crawl import expand_crawl
from .versions import (
    ScanLedger,
    ScanTarget,
    check_outdated,
    execute_scan,
    extract_version,
    load_location_catalog,
    plan_version_scan,
    prune_catalog,
    version_less,
)
from .vulns import CveRecord, VulnReport, cpe_and_vulns, cpe_identifier
from .s3acl import AclReport, acl_probe, bucket_from_url
from .scanhttp import GuardedTransport

__all__ = [
    "match_path_indicators",
    "FingerprintRule", "SoftwareComponent", "fingerprint", "load_rules",
    "expand_crawl",
    "ScanLedger", "ScanTarget", "check_outdated", "execute_scan",
    "extract_version", "load_location_catalog", "plan_version_scan",
    "prune_catalog", "version_less",
    "CveRecord", "VulnReport", "cpe_and_vulns", "cpe_identifier",
    "AclReport", "acl_probe", "bucket_from_url",
    "GuardedTransport",
]
