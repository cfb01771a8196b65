"""Contact selection and treatment/control group assignment."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..netmeta.enrich import extract_emails

TREATMENT = "Treatment"
CONTROL = "Control"

SYNTHETIC_ALIASES = ("abuse", "info", "security", "hostmaster")


@dataclass(frozen=True)
class ContactSelection:
    emails: tuple             # single choice for WHOIS, all aliases for synthetic
    source: str               # "whois" | "synthetic"


def select_contact(whois_record: str | list | None, domain: str,
                   seed: int = 0) -> ContactSelection:
    """abuse@ beats hostmaster@ beats a seeded random pick; empty WHOIS
    falls back to the four synthetic aliases at the domain, all as candidates."""
    if whois_record is None:
        emails = []
    elif isinstance(whois_record, str):
        emails = extract_emails(whois_record)
    else:
        emails = list(whois_record)
    if not emails:
        return ContactSelection(
            emails=tuple(f"{alias}@{domain}" for alias in SYNTHETIC_ALIASES),
            source="synthetic",
        )
    for prefix in ("abuse@", "hostmaster@"):
        for email in emails:
            if email.lower().startswith(prefix):
                return ContactSelection(emails=(email,), source="whois")
    rng = random.Random(f"{seed}:{domain}")
    return ContactSelection(emails=(rng.choice(sorted(emails)),), source="whois")


@dataclass
class GroupAssignment:
    fqdn_group: dict          # fqdn -> group
    contact_group: dict = field(default_factory=dict)
    pre_lift_sizes: tuple = (0, 0)

    def group_of(self, fqdn: str) -> str:
        return self.fqdn_group[fqdn]


def split_groups(fqdns, seed: int, contacts_by_fqdn: dict | None = None,
                 lift: bool = True) -> GroupAssignment:
    """Seeded equal split at FQDN granularity, optionally lifted to contacts.

    Pre-lift sizes differ by at most one (Treatment takes the extra on odd
    counts). With lifting on, a contact whose domains straddle both groups is
    moved wholesale to its majority group, ties to Treatment; the raw
    per-domain split stays available with lift=False.
    """
    fqdns = list(fqdns)
    if len(set(fqdns)) != len(fqdns):
        raise ValueError("fqdn list must be deduplicated")
    ordered = sorted(fqdns)
    random.Random(seed).shuffle(ordered)
    cut = (len(ordered) + 1) // 2
    fqdn_group = {f: TREATMENT for f in ordered[:cut]}
    fqdn_group.update({f: CONTROL for f in ordered[cut:]})
    assignment = GroupAssignment(fqdn_group=fqdn_group,
                                 pre_lift_sizes=(cut, len(ordered) - cut))
    if contacts_by_fqdn is None:
        return assignment

    domains_per_contact: dict = {}
    for fqdn in fqdns:
        contact = contacts_by_fqdn.get(fqdn)
        if contact is not None:
            domains_per_contact.setdefault(contact, []).append(fqdn)
    for contact, domains in sorted(domains_per_contact.items()):
        treat = sum(1 for d in domains if fqdn_group[d] == TREATMENT)
        control = len(domains) - treat
        group = TREATMENT if treat >= control else CONTROL
        assignment.contact_group[contact] = group
        if lift:
            for domain in domains:
                assignment.fqdn_group[domain] = group
    return assignment
