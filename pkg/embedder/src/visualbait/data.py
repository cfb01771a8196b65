"""Image loading and the synthetic bait-style dataset generator."""

from __future__ import annotations

import hashlib
import random
from pathlib import Path

import numpy as np
from PIL import Image

IMAGE_SIZE = 128


def load_image(path) -> np.ndarray:
    """float32 HxWx3 array in [0, 1], resampled to the model input size."""
    img = Image.open(path).convert("RGB").resize(
        (IMAGE_SIZE, IMAGE_SIZE), Image.BILINEAR)
    return np.asarray(img, dtype=np.float32) / 255.0


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_labeled_directory(root) -> list:
    """(sha256, label, array) per image; one subdirectory per class."""
    root = Path(root)
    out = []
    for class_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for image_path in sorted(class_dir.glob("*.png")):
            out.append((file_sha256(image_path), class_dir.name,
                        load_image(image_path)))
    return out


def _solid(rng) -> np.ndarray:
    color = [rng.uniform(0.55, 1.0), rng.uniform(0.0, 0.4), rng.uniform(0.0, 0.4)]
    img = np.ones((IMAGE_SIZE, IMAGE_SIZE, 3), dtype=np.float32) * color
    return img


def _stripes(rng) -> np.ndarray:
    # fixed stripe width, jittered phase: one visual mode per class
    img = np.zeros((IMAGE_SIZE, IMAGE_SIZE, 3), dtype=np.float32)
    width = 16
    phase = rng.randrange(width)
    for y in range(IMAGE_SIZE):
        on = ((y + phase) // width) % 2 == 0
        img[y, :, :] = (0.1, 0.7, 0.2) if on else (0.95, 0.95, 0.9)
    return img


def _checker(rng) -> np.ndarray:
    img = np.zeros((IMAGE_SIZE, IMAGE_SIZE, 3), dtype=np.float32)
    cell = 32
    px = rng.randrange(cell)
    py = rng.randrange(cell)
    for y in range(IMAGE_SIZE):
        for x in range(IMAGE_SIZE):
            on = (((y + py) // cell) + ((x + px) // cell)) % 2 == 0
            img[y, x, :] = (0.2, 0.2, 0.8) if on else (0.9, 0.9, 0.1)
    return img


GENERATORS = {"solid": _solid, "stripe": _stripes, "checker": _checker}


def generate_synthetic_dataset(out_dir, per_class: int = 50,
                               seed: int = 7, noise: float = 0.03) -> Path:
    """Three visually distinct classes written as PNGs, one dir per class."""
    out_dir = Path(out_dir)
    rng = random.Random(seed)
    np_rng = np.random.default_rng(seed)
    for name, generator in GENERATORS.items():
        class_dir = out_dir / name
        class_dir.mkdir(parents=True, exist_ok=True)
        for i in range(per_class):
            img = generator(rng)
            img = np.clip(img + np_rng.normal(0, noise, img.shape), 0.0, 1.0)
            Image.fromarray((img * 255).astype(np.uint8)).save(
                class_dir / f"{name}-{i:03d}.png")
    return out_dir
