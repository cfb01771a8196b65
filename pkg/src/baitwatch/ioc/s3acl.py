"""Object-storage bucket identification and read-only ACL probing."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from urllib.parse import urlsplit

from ..errors import AccessDenied, NoSuchBucket, NotObjectStorageUrl

OBJECT_STORAGE_ROOTS = ("amazonaws.com",)

GRANT_FULL_CONTROL = "FullControl"
GRANT_WRITE = "Write"
GRANT_READ_ACP = "ReadAcp"

_GRANT_NAMES = {
    "FULL_CONTROL": GRANT_FULL_CONTROL,
    "WRITE": GRANT_WRITE,
    "READ_ACP": GRANT_READ_ACP,
}

# principals meaning "anyone, unauthenticated"
_PUBLIC_PRINCIPALS = {"AllUsers", "http://acs.amazonaws.com/groups/global/AllUsers"}


@dataclass
class AclReport:
    bucket: str
    exists: bool
    readable_acl: bool = False
    grants: set = dc_field(default_factory=set)
    object_listing: int | None = None


def bucket_from_url(url: str, storage_roots=OBJECT_STORAGE_ROOTS) -> str:
    """Bucket name from virtual-hosted or path-style object-storage URLs."""
    try:
        parts = urlsplit(url)
        host = (parts.hostname or "").lower()
    except ValueError as exc:
        raise NotObjectStorageUrl(str(exc)) from exc
    root = next((r for r in storage_roots if host == r or host.endswith("." + r)), None)
    if root is None:
        raise NotObjectStorageUrl(url)
    prefix = host[: -(len(root) + 1)] if host != root else ""
    labels = prefix.split(".") if prefix else []

    # path style: s3.<root> or s3.<region>.<root>, bucket is first path segment
    if labels and labels[0] == "s3" and len(labels) <= 2:
        segments = [s for s in parts.path.split("/") if s]
        if not segments:
            raise NotObjectStorageUrl(f"no bucket in path of {url}")
        return segments[0]
    # virtual-hosted style: <bucket>.s3[.<region>].<root> or <bucket>.<root>
    if labels:
        if "s3" in labels[1:]:
            cut = labels[1:].index("s3") + 1
            bucket = ".".join(labels[:cut])
        else:
            bucket = ".".join(labels)
        if bucket:
            return bucket
    raise NotObjectStorageUrl(url)


def acl_probe(bucket: str, storage_client) -> AclReport:
    """Existence, ACL readability, public grants, optional listing count.

    Read-only by contract: the client exposes exists/get_acl/list_count only.
    """
    report = AclReport(bucket=bucket, exists=False)
    try:
        report.exists = storage_client.exists(bucket)
    except NoSuchBucket:
        return report
    if not report.exists:
        return report
    try:
        raw_grants = storage_client.get_acl(bucket)
    except AccessDenied:
        raw_grants = None
    if raw_grants is not None:
        report.readable_acl = True
        for grantee, permission in raw_grants:
            if grantee in _PUBLIC_PRINCIPALS and permission in _GRANT_NAMES:
                report.grants.add(_GRANT_NAMES[permission])
    try:
        report.object_listing = storage_client.list_count(bucket)
    except AccessDenied:
        report.object_listing = None
    return report
