"""URL-path indicators of upload-enabling components.

Keywords match case-insensitively on the percent-decoded path, on token
boundaries (so `repository` does not fire inside `repositories`). The CK
family is additionally matched in params, query, and fragment.
"""

from __future__ import annotations

import re
from urllib.parse import unquote, urlsplit

# indicator name -> keywords
PATH_KEYWORDS = {
    "SLiMS": ("__statics", "gudangsoal", "repository"),
    "CK-family": ("ckfinder", "ckimage", "kcfinder", "ckeditor", "fckeditor"),
    "Formcraft": ("formcraft",),
    "Webform": ("webform",),
    "SuperForms": ("super-forms",),
    "Formidable": ("formidable",),
}

# names whose keywords also match in params/query/fragment
EXTENDED_SCOPE = ("CK-family",)

_BOUNDARY = r"(?<![a-z0-9]){}(?![a-z0-9])"
_COMPILED = {
    name: [re.compile(_BOUNDARY.format(re.escape(kw)), re.I) for kw in kws]
    for name, kws in PATH_KEYWORDS.items()
}


def _normalize(text: str) -> str:
    return unquote(text or "").lower()


def match_path_indicators(url: str) -> list:
    """Indicator names triggered by the URL, in a fixed declaration order."""
    try:
        parts = urlsplit(url)
    except ValueError:
        return []
    path = _normalize(parts.path)
    extended = "?".join((
        path, _normalize(parts.query), _normalize(parts.fragment),
    ))
    hits = []
    for name, patterns in _COMPILED.items():
        haystack = extended if name in EXTENDED_SCOPE else path
        if any(p.search(haystack) for p in patterns):
            hits.append(name)
    return hits
