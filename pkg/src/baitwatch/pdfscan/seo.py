"""Admission filter: documents qualify on backlink volume and density."""

from __future__ import annotations

from dataclasses import dataclass
from urllib.parse import urlsplit

MIN_PDF_LINKS = 5
MIN_MEAN_LINKS_PER_PAGE = 1.0


@dataclass(frozen=True)
class SeoVerdict:
    total_pdf_links: int
    mean_links_per_page: float
    passes: bool


def is_pdf_link(url: str) -> bool:
    """True when the URL path ends in `.pdf`, case-insensitive.

    Query string and fragment are ignored: `/a.pdf?x=1` counts,
    `/a.php?f=x.pdf` does not.
    """
    try:
        path = urlsplit(url).path
    except ValueError:
        return False
    return path.lower().endswith(".pdf")


def seo_metric(doc, min_links: int = MIN_PDF_LINKS,
               min_mean: float = MIN_MEAN_LINKS_PER_PAGE) -> SeoVerdict:
    total = sum(1 for link in doc.links if is_pdf_link(link.url))
    mean = total / doc.page_count
    return SeoVerdict(
        total_pdf_links=total,
        mean_links_per_page=mean,
        passes=total >= min_links and mean >= min_mean,
    )
