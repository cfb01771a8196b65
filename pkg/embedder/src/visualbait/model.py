"""Embedding CNN: five conv blocks, three 4x4 max-pools, two FC layers, and
an L2 normalization head mapping a 128x128x3 image to a 32-d unit vector.

Each conv block is Convolution -> BatchNorm -> PReLU -> Dropout with a 3x3
kernel; channel widths run 8/16/32/64/128.
"""

from __future__ import annotations

import torch
from torch import nn

INPUT_SIZE = (3, 128, 128)
EMBEDDING_DIM = 32

# (name, expected output size as H x W x C, or flat width)
LAYER_TABLE = (
    ("CNN-1", (128, 128, 8)),
    ("CNN-2", (128, 128, 16)),
    ("CNN-3", (128, 128, 32)),
    ("MAXPOOL-1", (32, 32, 32)),
    ("CNN-4", (32, 32, 64)),
    ("MAXPOOL-2", (8, 8, 64)),
    ("CNN-5", (8, 8, 128)),
    ("MAXPOOL-3", (2, 2, 128)),
    ("FLATTEN", 512),
    ("FC", 128),
    ("FC", 32),
    ("L2", 32),
)


class ShapeMismatch(ValueError):
    pass


def _conv_block(c_in: int, c_out: int, dropout: float) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(c_in, c_out, kernel_size=3, padding=1),
        nn.BatchNorm2d(c_out),
        nn.PReLU(),
        nn.Dropout(dropout),
    )


class EmbeddingNet(nn.Module):
    def __init__(self, dropout: float = 0.1):
        super().__init__()
        self.stages = nn.ModuleDict({
            "CNN-1": _conv_block(3, 8, dropout),
            "CNN-2": _conv_block(8, 16, dropout),
            "CNN-3": _conv_block(16, 32, dropout),
            "MAXPOOL-1": nn.MaxPool2d(4),
            "CNN-4": _conv_block(32, 64, dropout),
            "MAXPOOL-2": nn.MaxPool2d(4),
            "CNN-5": _conv_block(64, 128, dropout),
            "MAXPOOL-3": nn.MaxPool2d(4),
        })
        self.flatten = nn.Flatten()
        self.fc1 = nn.Linear(512, 128)
        self.fc2 = nn.Linear(128, 32)

    def _check_input(self, x: torch.Tensor) -> None:
        if x.dim() != 4 or tuple(x.shape[1:]) != INPUT_SIZE:
            raise ShapeMismatch(
                f"expected NxCxHxW = Nx{INPUT_SIZE}, got {tuple(x.shape)}")

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        self._check_input(x)
        for stage in self.stages.values():
            x = stage(x)
        x = self.flatten(x)
        x = self.fc1(x)
        x = self.fc2(x)
        return nn.functional.normalize(x, p=2, dim=1)

    def stage_outputs(self, x: torch.Tensor) -> list:
        """(layer name, output size) per table row, for shape verification."""
        self._check_input(x)
        out = []
        for name, stage in self.stages.items():
            x = stage(x)
            n, c, h, w = x.shape
            out.append((name, (h, w, c)))
        x = self.flatten(x)
        out.append(("FLATTEN", x.shape[1]))
        x = self.fc1(x)
        out.append(("FC", x.shape[1]))
        x = self.fc2(x)
        out.append(("FC", x.shape[1]))
        x = nn.functional.normalize(x, p=2, dim=1)
        out.append(("L2", x.shape[1]))
        return out


def build_model(dropout: float = 0.1, seed: int | None = None) -> EmbeddingNet:
    if seed is not None:
        torch.manual_seed(seed)
    return EmbeddingNet(dropout=dropout)


def layer_output_sizes(model: EmbeddingNet, batch: int = 1) -> list:
    with torch.no_grad():
        model.eval()
        return model.stage_outputs(torch.zeros(batch, *INPUT_SIZE))
