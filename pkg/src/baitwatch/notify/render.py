"""Notification rendering: email body, CSV attachment, dry-run outbox."""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from email.message import EmailMessage

from ..errors import NoLivePdfs

BODY_DOMAIN_CAP = 3
BODY_LINK_CAP = 3

BODY_TEMPLATE = """\
Hello,

I am a security researcher at {institution} in {country}. During an ongoing
academic measurement of search-engine abuse we found that {n_domains} of your
domains ({domain_list} among them) currently serve {n_pdfs} PDF files that are
part of a search-poisoning operation. Each file shows a deceptive first page
whose embedded link sends visitors to phishing pages, malware downloads, or
online scams. Victims reach these files through ordinary search results, which
rank them highly because of your domains' good reputation.

Example locations (up to three files on up to three domains):

{examples}

The attached CSV lists every affected file as a relative path per domain. The
list may be incomplete: new files may have been uploaded after this message
was prepared.

SUGGESTED REMEDIATION:
Removing the listed files immediately blunts the campaign. We also recommend
auditing the software running on these domains for outdated, vulnerable, or
misconfigured components that permit unrestricted file uploads, so new files
cannot take their place.

We will continue to observe the {n_domains} domains to measure whether the
files remain reachable. To opt out of this monitoring, or for any question or
feedback, write to {sender}.

DISCLAIMER: This message is part of an academic research project. We never
attempted to exploit anything, we sell nothing, and we seek no bounty.
"""


@dataclass(frozen=True)
class EmailReport:
    contact: str
    subject: str
    body: str
    csv_text: str
    n_domains: int
    n_pdfs: int


def _relative(path_or_url: str) -> str:
    # accept either a relative path or a full URL
    match = re.match(r"https?://[^/]+(/.*)$", path_or_url)
    if match:
        return match.group(1)
    return path_or_url if path_or_url.startswith("/") else "/" + path_or_url


def render_csv(live_pdfs: dict) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["domain", "relative_path"])
    for domain in sorted(live_pdfs):
        for path in sorted(_relative(p) for p in live_pdfs[domain]):
            writer.writerow([domain, path])
    return buffer.getvalue()


def parse_report_csv(text: str) -> dict:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != ["domain", "relative_path"]:
        raise ValueError(f"unexpected CSV header: {header}")
    out: dict = {}
    for domain, path in reader:
        out.setdefault(domain, []).append(path)
    return out


def render_report(contact: str, live_pdfs: dict, institution: str,
                  country: str, sender: str) -> EmailReport:
    """live_pdfs: domain -> list of pdf paths (or URLs) currently online."""
    live_pdfs = {d: list(paths) for d, paths in live_pdfs.items() if paths}
    if not live_pdfs:
        raise NoLivePdfs(contact)
    n_domains = len(live_pdfs)
    n_pdfs = sum(len(paths) for paths in live_pdfs.values())
    # largest offenders first, names break ties, three domains at most
    shown = sorted(live_pdfs, key=lambda d: (-len(live_pdfs[d]), d))[:BODY_DOMAIN_CAP]
    example_lines = []
    for domain in shown:
        example_lines.append(f"{domain}:")
        for path in sorted(_relative(p) for p in live_pdfs[domain])[:BODY_LINK_CAP]:
            example_lines.append(path)
    body = BODY_TEMPLATE.format(
        institution=institution,
        country=country,
        n_domains=n_domains,
        domain_list=", ".join(shown),
        n_pdfs=n_pdfs,
        examples="\n".join(example_lines),
        sender=sender,
    )
    return EmailReport(
        contact=contact,
        subject=f"Deceptive PDF files hosted on {n_domains} of your domains",
        body=body,
        csv_text=render_csv(live_pdfs),
        n_domains=n_domains,
        n_pdfs=n_pdfs,
    )


def write_outbox(report: EmailReport, outbox_dir, sender: str,
                 round_no: int) -> str:
    """Dry-run transport: one RFC-5322 file per send in the outbox directory."""
    from pathlib import Path

    outbox_dir = Path(outbox_dir)
    outbox_dir.mkdir(parents=True, exist_ok=True)
    message = EmailMessage()
    message["From"] = sender
    message["To"] = report.contact
    message["Subject"] = report.subject
    message.set_content(report.body)
    message.add_attachment(report.csv_text.encode(), maintype="text",
                           subtype="csv", filename="affected-files.csv")
    safe = re.sub(r"[^A-Za-z0-9_.@-]", "_", report.contact)
    path = outbox_dir / f"round{round_no}-{safe}.eml"
    path.write_bytes(bytes(message))
    return str(path)
