"""Embedding exchange files shared with the embedding trainer.

`embeddings.tsv`: sha256 followed by 32 decimal floats per row (written with
12 significant digits so values round-trip). `anchors.tsv`: same columns
plus a trailing campaign label.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path

DIMENSIONS = 32
NORM_TOLERANCE = 1e-5


@dataclass(frozen=True)
class Embedding:
    sha256: str
    vector: tuple

    def __post_init__(self):
        if len(self.vector) != DIMENSIONS:
            raise ValueError(
                f"{self.sha256}: expected {DIMENSIONS} dims, got {len(self.vector)}")


def _check_norm(embedding: Embedding) -> None:
    norm = math.sqrt(sum(x * x for x in embedding.vector))
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise ValueError(f"{embedding.sha256}: norm {norm} outside unit tolerance")


def _format_row(sha256: str, vector) -> str:
    return "\t".join([sha256] + [f"{x:.12g}" for x in vector])


def write_embeddings(path, embeddings) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        for emb in embeddings:
            fh.write(_format_row(emb.sha256, emb.vector) + "\n")
    os.replace(tmp, path)


def load_embeddings(path, check_norm: bool = True) -> list:
    out = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        fields = line.split("\t")
        emb = Embedding(fields[0], tuple(float(x) for x in fields[1:]))
        if check_norm:
            _check_norm(emb)
        out.append(emb)
    return out


def write_anchors(path, anchors) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        for anchor in anchors:
            fh.write(_format_row(anchor.embedding.sha256, anchor.embedding.vector)
                     + f"\t{anchor.label}\n")
    os.replace(tmp, path)


def load_anchors(path, check_norm: bool = True) -> list:
    from .anchors import Anchor

    out = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        fields = line.split("\t")
        emb = Embedding(fields[0], tuple(float(x) for x in fields[1:-1]))
        if check_norm:
            _check_norm(emb)
        out.append(Anchor(embedding=emb, label=fields[-1]))
    return out
