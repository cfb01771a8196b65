"""Same-site crawl expansion when the homepage alone yielded no components."""

from __future__ import annotations

import random
import re
from urllib.parse import urljoin, urlsplit

from ..errors import NoLinksFound
from ..netmeta.urlsplit import split_url

HREF_RE = re.compile(r"""<a\s[^>]*href=["']([^"'#]+)["']""", re.I)

MAX_PAGES = 20


def expand_crawl(fqdn: str, homepage_url: str, homepage_html: str,
                 seed: int, cap: int = MAX_PAGES) -> list:
    """Uniform sample (no replacement) of same-registrable-domain anchors."""
    try:
        site = split_url(homepage_url).etld1
    except Exception:
        site = fqdn
    candidates = []
    seen = set()
    for match in HREF_RE.finditer(homepage_html):
        href = match.group(1).strip()
        if href.lower().startswith(("javascript:", "mailto:", "data:")):
            continue
        absolute = urljoin(homepage_url, href)
        try:
            parts = urlsplit(absolute)
        except ValueError:
            continue
        if parts.scheme not in ("http", "https"):
            continue
        try:
            target = split_url(absolute).etld1
        except Exception:
            continue
        if target != site:
            continue
        if absolute not in seen:
            seen.add(absolute)
            candidates.append(absolute)
    if not candidates:
        raise NoLinksFound(fqdn)
    if len(candidates) <= cap:
        return candidates
    rng = random.Random(seed)
    sample = rng.sample(candidates, cap)
    return sample
