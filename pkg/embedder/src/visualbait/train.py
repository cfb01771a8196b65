"""Training loop and embedding export in the clustering exchange format."""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .loss import triplet_loss
from .model import EmbeddingNet, build_model

MIN_IMAGES_PER_CLASS = 20


class InsufficientData(ValueError):
    pass


@dataclass
class TrainResult:
    model: EmbeddingNet
    initial_val_loss: float
    final_val_loss: float
    epochs_run: int


def _to_tensor(arrays) -> torch.Tensor:
    stacked = np.stack(arrays).transpose(0, 3, 1, 2)  # NHWC -> NCHW
    return torch.from_numpy(np.ascontiguousarray(stacked))


def _split(dataset, holdout_fraction: float, rng: random.Random):
    by_label: dict = {}
    for item in dataset:
        by_label.setdefault(item[1], []).append(item)
    train_set, val_set = [], []
    for label in sorted(by_label):
        items = list(by_label[label])
        rng.shuffle(items)
        k = max(1, int(len(items) * holdout_fraction))
        val_set.extend(items[:k])
        train_set.extend(items[k:])
    return train_set, val_set


def _epoch_loss(model, items, margin, optimizer=None, batch_size=32,
                rng=None) -> float:
    order = list(range(len(items)))
    if rng is not None:
        rng.shuffle(order)
    losses = []
    for start in range(0, len(order), batch_size):
        chunk = [items[i] for i in order[start:start + batch_size]]
        labels = [label for _, label, _ in chunk]
        if len(set(labels)) < 2:
            continue
        images = _to_tensor([arr for _, _, arr in chunk])
        if optimizer is not None:
            optimizer.zero_grad()
            loss = triplet_loss(model(images), labels, margin)
            loss.backward()
            optimizer.step()
        else:
            with torch.no_grad():
                loss = triplet_loss(model(images), labels, margin)
        losses.append(float(loss.detach()))
    return sum(losses) / len(losses) if losses else 0.0


def train(dataset, margin: float = 0.2, lr: float = 1e-3, epochs: int = 50,
          batch_size: int = 32, holdout_fraction: float = 0.2,
          patience: int = 5, dropout: float = 0.1, seed: int = 11) -> TrainResult:
    """dataset: (sha256, label, HxWx3 float array) triples.

    Adam on the semihard triplet loss with early stopping on a held-out
    split; raises InsufficientData below two classes or twenty images per
    class.
    """
    labels = {}
    for _, label, _ in dataset:
        labels[label] = labels.get(label, 0) + 1
    if len(labels) < 2:
        raise InsufficientData("need at least two classes")
    if min(labels.values()) < MIN_IMAGES_PER_CLASS:
        raise InsufficientData(
            f"need >= {MIN_IMAGES_PER_CLASS} images per class, got {labels}")

    rng = random.Random(seed)
    torch.manual_seed(seed)
    model = build_model(dropout=dropout)
    train_set, val_set = _split(dataset, holdout_fraction, rng)

    model.eval()
    initial_val = _epoch_loss(model, val_set, margin)
    best_val = float("inf")
    best_state = None
    since_best = 0
    epochs_run = 0
    optimizer = torch.optim.Adam(model.parameters(), lr=lr)
    for _ in range(epochs):
        epochs_run += 1
        model.train()
        _epoch_loss(model, train_set, margin, optimizer=optimizer,
                    batch_size=batch_size, rng=rng)
        model.eval()
        val = _epoch_loss(model, val_set, margin)
        if val < best_val - 1e-6:
            best_val = val
            best_state = {k: v.clone() for k, v in model.state_dict().items()}
            since_best = 0
        else:
            since_best += 1
            if since_best >= patience:
                break
    if best_state is not None:
        model.load_state_dict(best_state)
    model.eval()
    return TrainResult(model=model, initial_val_loss=initial_val,
                       final_val_loss=_epoch_loss(model, val_set, margin),
                       epochs_run=epochs_run)


def embed_images(model: EmbeddingNet, dataset, batch_size: int = 64) -> list:
    """(sha256, 32-vector) rows for every dataset item."""
    model.eval()
    rows = []
    with torch.no_grad():
        for start in range(0, len(dataset), batch_size):
            chunk = dataset[start:start + batch_size]
            vectors = model(_to_tensor([arr for _, _, arr in chunk]))
            for (sha, _, _), vec in zip(chunk, vectors):
                rows.append((sha, tuple(float(x) for x in vec)))
    return rows


def write_embeddings(path, rows) -> None:
    """Exchange format: sha256 + 32 floats per row; atomic replace."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        for sha, vector in rows:
            fh.write("\t".join([sha] + [f"{x:.12g}" for x in vector]) + "\n")
    os.replace(tmp, path)


def save_weights(model: EmbeddingNet, path) -> None:
    torch.save(model.state_dict(), path)


def load_weights(path, dropout: float = 0.1) -> EmbeddingNet:
    model = build_model(dropout=dropout)
    model.load_state_dict(torch.load(path, weights_only=True))
    model.eval()
    return model
