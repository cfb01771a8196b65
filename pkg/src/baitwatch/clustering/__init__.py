from .dbscan import NOISE, dbscan
from .anchors import (
    NEW_CLUSTER,
    NOISE_LABEL,
    Anchor,
    ClusterAssignment,
    cluster_pipeline,
    label_clusters,
    refine,
)
from .io import (
    Embedding,
    load_anchors,
    load_embeddings,
    write_anchors,
    write_embeddings,
)

__all__ = [
    "NOISE", "dbscan",
    "NEW_CLUSTER", "NOISE_LABEL", "Anchor", "ClusterAssignment",
    "cluster_pipeline", "label_clusters", "refine",
    "Embedding", "load_anchors", "load_embeddings",
    "write_anchors", "write_embeddings",
]
