"""Remediation measurement: per-group takedown rates, logistic-GLM
significance, and the per-contact cleanup taxonomy."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date

import numpy as np

from ..errors import InsufficientHistory
from .contacts import CONTROL, TREATMENT

GLM_TOL = 1e-8
GLM_MAX_ITER = 50

EMAIL_BODY_ONLY = "EmailBodyOnly"
PARTIAL = "Partial"
DEEP = "Deep"


@dataclass(frozen=True)
class RemediationStats:
    group: str
    pdfs_total: int
    pdfs_offline_by_deadline: int
    rate: float
    p_value: float


@dataclass
class AnalysisResult:
    per_group: dict           # group -> RemediationStats
    coefficient: float        # GLM slope for the treatment indicator
    p_value: float
    taxonomy: dict = field(default_factory=dict)  # contact -> class or None


def fit_logistic_glm(X, y, tol: float = GLM_TOL, max_iter: int = GLM_MAX_ITER):
    """IRLS fit of a binomial GLM with logistic link; returns (beta, cov)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    beta = np.zeros(X.shape[1])
    H = np.eye(X.shape[1])
    for _ in range(max_iter):
        eta = X @ beta
        mu = 1.0 / (1.0 + np.exp(-eta))
        w = np.clip(mu * (1.0 - mu), 1e-10, None)
        z = eta + (y - mu) / w
        WX = X * w[:, None]
        H = X.T @ WX
        try:
            beta_new = np.linalg.solve(H, X.T @ (w * z))
        except np.linalg.LinAlgError:
            beta_new = np.linalg.lstsq(X, z, rcond=None)[0]
        if np.max(np.abs(beta_new - beta)) < tol:
            beta = beta_new
            break
        beta = beta_new
    cov = np.linalg.inv(H)
    return beta, cov


def wald_p_value(beta, cov, index: int = 1) -> float:
    """Two-sided p-value of the Wald statistic for one coefficient."""
    se = math.sqrt(max(cov[index, index], 1e-300))
    z = beta[index] / se
    return math.erfc(abs(z) / math.sqrt(2.0))


def _offline_at(store, url: str, deadline: date) -> bool | None:
    """Status on the last observed day at or before the deadline."""
    days = [d for d in store.days_for(url) if d <= deadline]
    if not days:
        return None
    return store.day_status(url, days[-1]) == "offline"


def classify_cleanup(reported: dict, body_listed, post_notification: dict):
    """Per-contact cleanup class from final online status maps.

    reported: url -> offline?  (all PDFs in the CSV attachment)
    body_listed: urls shown in the email body (subset of reported)
    post_notification: url -> offline? for PDFs first observed after the send
    """
    body_listed = set(body_listed)
    body_clean = all(reported[u] for u in body_listed if u in reported)
    all_reported_clean = all(reported.values()) if reported else False
    post_clean = all(post_notification.values()) if post_notification else True
    if all_reported_clean and post_clean:
        return DEEP
    if all_reported_clean:
        return PARTIAL
    if body_listed and body_clean and not all_reported_clean:
        return EMAIL_BODY_ONLY
    return None


def remediation_analysis(store, notified_pdfs, deadline: date,
                         window_start: date | None = None,
                         contact_reports: dict | None = None) -> AnalysisResult:
    """notified_pdfs: iterable of (url, group) covering both study groups.

    Every notified URL must have probe history by the deadline; per-contact
    taxonomy is computed when contact_reports supplies
    contact -> (reported urls, body-listed urls, post-notification urls).
    """
    rows = []
    for url, group in notified_pdfs:
        offline = _offline_at(store, url, deadline)
        if offline is None:
            raise InsufficientHistory(f"no events for {url} by {deadline}")
        if window_start is not None:
            last = max(store.days_for(url))
            if last < window_start:
                raise InsufficientHistory(
                    f"{url}: history ends {last}, before {window_start}")
        rows.append((url, group, offline))

    groups = {TREATMENT: [], CONTROL: []}
    for _, group, offline in rows:
        groups.setdefault(group, []).append(offline)
    for group in (TREATMENT, CONTROL):
        if not groups[group]:
            raise InsufficientHistory(f"no observations in {group} group")

    X = np.array([[1.0, 1.0 if g == TREATMENT else 0.0] for _, g, _ in rows])
    y = np.array([1.0 if offline else 0.0 for _, _, offline in rows])
    beta, cov = fit_logistic_glm(X, y)
    p_value = wald_p_value(beta, cov, index=1)

    per_group = {}
    for group, flags in groups.items():
        total = len(flags)
        cleaned = sum(flags)
        per_group[group] = RemediationStats(
            group=group, pdfs_total=total, pdfs_offline_by_deadline=cleaned,
            rate=cleaned / total, p_value=p_value,
        )

    taxonomy = {}
    for contact, (reported_urls, body_urls, post_urls) in \
            (contact_reports or {}).items():
        reported = {u: bool(_offline_at(store, u, deadline))
                    for u in reported_urls}
        post = {u: bool(_offline_at(store, u, deadline)) for u in post_urls}
        taxonomy[contact] = classify_cleanup(reported, body_urls, post)

    return AnalysisResult(per_group=per_group, coefficient=float(beta[1]),
                          p_value=p_value, taxonomy=taxonomy)
