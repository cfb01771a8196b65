"""Anchor-based cluster labeling and the eps-refinement conflict loop.

Pre-labeled anchors ride along in the point set; a computed cluster inherits
the label of the anchors it contains. Clusters mixing anchor labels are
re-clustered at progressively smaller eps until pure; a nearest-anchor floor
rule guarantees termination when eps bottoms out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dbscan import NOISE, dbscan
from .io import Embedding

NEW_CLUSTER = "NewCluster"
NOISE_LABEL = "Noise"

EPS0 = 0.25
EPS_STEP = 0.01
DEFAULT_MIN_PTS = 4


@dataclass(frozen=True)
class Anchor:
    embedding: Embedding
    label: str


@dataclass(frozen=True)
class ClusterAssignment:
    sha256: str
    cluster_id: int          # NOISE for noise points
    label: str               # campaign label | NEW_CLUSTER | NOISE_LABEL


def label_clusters(cluster_ids: dict, anchors) -> tuple:
    """(assignments, conflicts): conflicts maps cluster id -> mixed label set.

    Members of conflicted clusters are withheld from the assignment list;
    anchor-free clusters become NEW_CLUSTER for human review.
    """
    anchor_label = {a.embedding.sha256: a.label for a in anchors}
    labels_per_cluster: dict = {}
    for sha, cid in cluster_ids.items():
        if cid == NOISE:
            continue
        if sha in anchor_label:
            labels_per_cluster.setdefault(cid, set()).add(anchor_label[sha])
    conflicts = {cid: labels for cid, labels in labels_per_cluster.items()
                 if len(labels) > 1}
    assignments = []
    for sha in sorted(cluster_ids):
        cid = cluster_ids[sha]
        if cid == NOISE:
            assignments.append(ClusterAssignment(sha, NOISE, NOISE_LABEL))
            continue
        if cid in conflicts:
            continue
        found = labels_per_cluster.get(cid)
        label = next(iter(found)) if found else NEW_CLUSTER
        assignments.append(ClusterAssignment(sha, cid, label))
    return assignments, conflicts


def _distance(a, b) -> float:
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def _nearest_anchor_label(point: Embedding, anchors) -> str:
    best = min(anchors,
               key=lambda a: (_distance(point.vector, a.embedding.vector),
                              a.embedding.sha256))
    return best.label


def refine(members, anchors, eps0: float = EPS0, step: float = EPS_STEP,
           min_pts: int = DEFAULT_MIN_PTS) -> tuple:
    """Resolve one mixed cluster; returns (assignments, iterations used).

    Re-clusters the members at eps0, eps0-step, eps0-2*step, ... until no
    computed sub-cluster mixes anchor labels (an already-pure cluster comes
    back unchanged from the eps0 pass). When eps bottoms out at <= step with
    conflicts still present, every member is assigned to its nearest
    anchor's label (sha256 tie-break on equidistant anchors). Assignment
    cluster ids are local to this call.
    """
    members = list(members)
    member_shas = {m.sha256 for m in members}
    member_anchors = [a for a in anchors if a.embedding.sha256 in member_shas]
    iterations = 0
    while True:
        eps = eps0 - iterations * step
        iterations += 1
        # tolerance absorbs float error in eps0 - k*step at the floor boundary
        if eps <= step + 1e-12:
            # floor rule
            labels_of = {m.sha256: _nearest_anchor_label(m, member_anchors or anchors)
                         for m in members}
            local_ids = {lbl: i for i, lbl in enumerate(sorted(set(labels_of.values())))}
            assignments = [
                ClusterAssignment(sha, local_ids[labels_of[sha]], labels_of[sha])
                for sha in sorted(labels_of)
            ]
            return assignments, iterations
        ids = dbscan(members, eps, min_pts)
        assignments, conflicts = label_clusters(ids, member_anchors)
        if not conflicts:
            return assignments, iterations


def cluster_pipeline(points, anchors, eps0: float = EPS0, step: float = EPS_STEP,
                     min_pts: int = DEFAULT_MIN_PTS) -> tuple:
    """dbscan -> anchor labeling -> conflict refinement, deterministically.

    Returns (assignments, stats) where stats records refine iteration counts
    per conflicted top-level cluster.
    """
    point_shas = {p.sha256 for p in points}
    missing = [a.embedding.sha256 for a in anchors
               if a.embedding.sha256 not in point_shas]
    if missing:
        raise ValueError(f"anchors not embedded in point set: {missing[:3]}")

    ids = dbscan(points, eps0, min_pts)
    assignments, conflicts = label_clusters(ids, anchors)
    by_sha = {p.sha256: p for p in points}
    final = {a.sha256: a for a in assignments}
    next_id = max((cid for cid in ids.values() if cid != NOISE), default=-1) + 1
    stats = {"refined_clusters": 0, "iterations": {}}

    for cid in sorted(conflicts):
        members = [by_sha[sha] for sha, c in sorted(ids.items()) if c == cid]
        resolved, iterations = refine(members, anchors, eps0, step, min_pts)
        stats["refined_clusters"] += 1
        stats["iterations"][cid] = iterations
        remap: dict = {}
        for item in resolved:
            if item.cluster_id == NOISE:
                final[item.sha256] = ClusterAssignment(item.sha256, NOISE, NOISE_LABEL)
                continue
            if item.cluster_id not in remap:
                remap[item.cluster_id] = next_id
                next_id += 1
            final[item.sha256] = ClusterAssignment(
                item.sha256, remap[item.cluster_id], item.label)
    ordered = [final[sha] for sha in sorted(final)]
    return ordered, stats
