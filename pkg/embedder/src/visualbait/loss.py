"""Triplet loss with online semihard mining over a batch.

Distances are squared Euclidean throughout (mining and loss). For every
anchor/positive pair the semihard negatives satisfy
d(a,p) < d(a,n) < d(a,p) + margin; pairs with no semihard negative fall back
to the single hardest (nearest) negative.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch

MARGIN = 0.2


class DegenerateBatch(ValueError):
    """Batch carries fewer than two distinct labels."""


@dataclass(frozen=True)
class TripletBatch:
    triples: tuple            # (anchor, positive, negative) index triples

    def __len__(self):
        return len(self.triples)


def pairwise_squared_distances(embeddings: torch.Tensor) -> torch.Tensor:
    sq = (embeddings ** 2).sum(dim=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * embeddings @ embeddings.T
    return d2.clamp_min(0.0)


def mine_semihard(distances, labels, margin: float = MARGIN) -> TripletBatch:
    """Enumerate semihard triples from a symmetric zero-diagonal matrix."""
    distances = torch.as_tensor(distances, dtype=torch.float64)
    labels = list(labels)
    n = len(labels)
    triples = []
    for a in range(n):
        for p in range(n):
            if a == p or labels[a] != labels[p]:
                continue
            d_ap = float(distances[a, p])
            semihard = []
            hardest = None
            for neg in range(n):
                if labels[neg] == labels[a]:
                    continue
                d_an = float(distances[a, neg])
                if d_ap < d_an < d_ap + margin:
                    semihard.append(neg)
                if hardest is None or d_an < float(distances[a, hardest]):
                    hardest = neg
            if semihard:
                triples.extend((a, p, neg) for neg in semihard)
            elif hardest is not None:
                triples.append((a, p, hardest))
    return TripletBatch(triples=tuple(triples))


def triplet_loss(embeddings: torch.Tensor, labels, margin: float = MARGIN,
                 batch: TripletBatch | None = None) -> torch.Tensor:
    """Mean over mined triplets of max(0, d(a,p) - d(a,n) + margin).

    Mining runs on the detached distance matrix; the loss stays
    differentiable in the embeddings. Pass a pre-mined batch to reuse a
    selection mask.
    """
    labels = list(labels)
    if len(set(labels)) < 2:
        raise DegenerateBatch("triplet loss needs at least two labels")
    distances = pairwise_squared_distances(embeddings)
    if batch is None:
        batch = mine_semihard(distances.detach(), labels, margin)
    if not batch.triples:
        return embeddings.new_zeros(())
    idx = torch.as_tensor(batch.triples, dtype=torch.long,
                          device=embeddings.device)
    d_ap = distances[idx[:, 0], idx[:, 1]]
    d_an = distances[idx[:, 0], idx[:, 2]]
    return torch.clamp(d_ap - d_an + margin, min=0.0).mean()
