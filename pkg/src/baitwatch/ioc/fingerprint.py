"""Rule-based technology fingerprinting over captured HTTP transactions.

A transaction is one request/response record from the capture stage:
{"url": ..., "status": ..., "headers": {...}, "body": "...", "cookies": [...]}.
Cookie names are also picked up from set-cookie headers. Every emitted
component carries the id of the rule that produced it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from ..errors import EmptyCapture

META_GENERATOR_RE = re.compile(
    r"<meta[^>]+name=[\"']generator[\"'][^>]+content=[\"']([^\"']+)[\"']"
    r"|<meta[^>]+content=[\"']([^\"']+)[\"'][^>]+name=[\"']generator[\"']",
    re.I,
)


@dataclass(frozen=True)
class FingerprintRule:
    rule_id: str
    field: str               # header:<name> | cookie | meta-generator | url | body
    pattern: re.Pattern
    category: str
    name: str                # literal, or "@" to use the (?P<name>...) group


@dataclass(frozen=True)
class SoftwareComponent:
    category: str
    name: str
    version: str | None
    observed_on: str         # fqdn
    evidence_url: str
    rule_id: str = ""


def load_rules(path=None) -> list:
    if path is None:
        text = resources.files("baitwatch.data").joinpath("fingerprints.tsv").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    rules = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rule_id, field, pattern, category, name = line.split("\t")
        rules.append(FingerprintRule(rule_id, field, re.compile(pattern, re.I),
                                     category, name))
    return rules


def _cookie_names(transaction) -> list:
    names = list(transaction.get("cookies", ()))
    headers = transaction.get("headers", {})
    for key, value in headers.items():
        if key.lower() == "set-cookie":
            values = value if isinstance(value, (list, tuple)) else [value]
            for v in values:
                names.append(v.split("=", 1)[0].strip())
    return names


def _generator_values(body: str) -> list:
    out = []
    for m in META_GENERATOR_RE.finditer(body):
        out.append(m.group(1) or m.group(2))
    return out


def _haystacks(rule: FingerprintRule, transaction) -> list:
    headers = {k.lower(): v for k, v in transaction.get("headers", {}).items()}
    if rule.field.startswith("header:"):
        value = headers.get(rule.field.split(":", 1)[1])
        return [value] if value else []
    if rule.field == "cookie":
        return _cookie_names(transaction)
    if rule.field == "meta-generator":
        return _generator_values(transaction.get("body") or "")
    if rule.field == "url":
        return [transaction.get("url") or ""]
    if rule.field == "body":
        body = transaction.get("body")
        return [body] if body else []
    return []


def _component_name(rule: FingerprintRule, match: re.Match) -> str:
    if rule.name != "@":
        return rule.name
    captured = match.groupdict().get("name") or ""
    return captured.title()


def fingerprint(transactions, rules, fqdn: str | None = None) -> list:
    """Apply every rule to every transaction; deduplicated component list."""
    transactions = list(transactions)
    if not transactions:
        raise EmptyCapture("no transactions captured")
    components = []
    seen = set()
    for transaction in transactions:
        observed_on = fqdn or transaction.get("fqdn") or ""
        for rule in rules:
            for haystack in _haystacks(rule, transaction):
                match = rule.pattern.search(haystack)
                if not match:
                    continue
                version = match.groupdict().get("version")
                name = _component_name(rule, match)
                key = (rule.category, name, version, observed_on)
                if key in seen:
                    continue
                seen.add(key)
                components.append(SoftwareComponent(
                    category=rule.category, name=name, version=version,
                    observed_on=observed_on,
                    evidence_url=transaction.get("url") or "",
                    rule_id=rule.rule_id,
                ))
    return components
