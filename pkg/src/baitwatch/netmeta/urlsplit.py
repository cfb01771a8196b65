"""URL decomposition against a vendored public-suffix snapshot.

The rule file ships with the package and is only updated deliberately, so
eTLD+1 ("domain root") splits stay stable across the lifetime of a dataset.
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from urllib.parse import urlsplit as _urlsplit

from ..errors import IpLiteralHost, UnparsableUrl


@dataclass(frozen=True)
class SplitUrl:
    fqdn: str
    etld1: str
    path: str


class SuffixRules:
    """Matcher over publicsuffix.org-style rules (plain, wildcard, exception)."""

    def __init__(self, rules):
        self.plain = set()
        self.wildcard = set()   # stored without the leading "*."
        self.exception = set()  # stored without the leading "!"
        for rule in rules:
            rule = rule.strip().lower()
            if not rule or rule.startswith("//"):
                continue
            if rule.startswith("!"):
                self.exception.add(rule[1:])
            elif rule.startswith("*."):
                self.wildcard.add(rule[2:])
            else:
                self.plain.add(rule)

    @classmethod
    def from_file(cls, path) -> "SuffixRules":
        with open(path) as fh:
            return cls(fh.readlines())

    def public_suffix(self, host: str) -> str:
        labels = host.split(".")
        # exception rules win and drop their leftmost label
        for i in range(len(labels)):
            candidate = ".".join(labels[i:])
            if candidate in self.exception:
                return ".".join(labels[i + 1:])
        best = ""
        for i in range(len(labels)):
            candidate = ".".join(labels[i:])
            if candidate in self.plain and len(candidate) > len(best):
                best = candidate
            if i > 0:
                wild = ".".join(labels[i:])
                if wild in self.wildcard:
                    cand = ".".join(labels[i - 1:])
                    if len(cand) > len(best):
                        best = cand
        if best:
            return best
        # default rule "*": the rightmost label is the suffix
        return labels[-1]


@lru_cache(maxsize=1)
def default_rules() -> SuffixRules:
    data = resources.files("baitwatch.data").joinpath("public_suffixes.dat")
    return SuffixRules(data.read_text().splitlines())


def _normalize_host(host: str) -> str:
    host = host.strip().rstrip(".").lower()
    if not host:
        raise UnparsableUrl("empty host")
    try:
        host.encode("ascii")
    except UnicodeEncodeError:
        try:
            host = host.encode("idna").decode("ascii")
        except UnicodeError as exc:
            raise UnparsableUrl(f"cannot encode host {host!r}") from exc
    return host


def split_url(url: str, rules: SuffixRules | None = None) -> SplitUrl:
    """Split an absolute URL into (fqdn, etld1, path).

    Raises UnparsableUrl for relative or damaged input and IpLiteralHost for
    IP-address hosts, which have no eTLD+1.
    """
    try:
        parts = _urlsplit(url)
    except ValueError as exc:
        raise UnparsableUrl(str(exc)) from exc
    if parts.scheme not in ("http", "https") or not parts.netloc:
        raise UnparsableUrl(f"not an absolute http(s) URL: {url!r}")
    try:
        hostname = parts.hostname
    except ValueError as exc:
        raise UnparsableUrl(str(exc)) from exc
    if hostname is None:
        raise UnparsableUrl(f"no host in {url!r}")
    try:
        ipaddress.ip_address(hostname)
    except ValueError:
        pass
    else:
        raise IpLiteralHost(hostname)

    fqdn = _normalize_host(hostname)
    if "." not in fqdn:
        raise UnparsableUrl(f"host {fqdn!r} has no registrable domain")
    rules = rules or default_rules()
    suffix = rules.public_suffix(fqdn)
    if fqdn == suffix:
        raise UnparsableUrl(f"host {fqdn!r} is a public suffix")
    remainder = fqdn[: -(len(suffix) + 1)]
    etld1 = remainder.split(".")[-1] + "." + suffix
    return SplitUrl(fqdn=fqdn, etld1=etld1, path=parts.path or "/")
