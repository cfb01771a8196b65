"""Command-line interface: train on a labeled image tree, embed a directory."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .data import generate_synthetic_dataset, load_labeled_directory
from .train import (
    InsufficientData,
    embed_images,
    load_weights,
    save_weights,
    train,
    write_embeddings,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embedder",
        description="Train/serve the visual-bait embedding model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train on a directory tree (class per subdir)")
    p.add_argument("--data", required=True)
    p.add_argument("--out", default="weights.pt")
    p.add_argument("--embeddings-out", default=None,
                   help="also emit embeddings.tsv for the training images")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--margin", type=float, default=0.2)
    p.add_argument("--dropout", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=11)

    p = sub.add_parser("embed", help="embed a directory of images")
    p.add_argument("--images", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--out", default="embeddings.tsv")

    p = sub.add_parser("synth", help="generate the synthetic 3-class dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--per-class", type=int, default=50)
    p.add_argument("--seed", type=int, default=7)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "synth":
        out = generate_synthetic_dataset(args.out, per_class=args.per_class,
                                         seed=args.seed)
        print(f"wrote synthetic dataset to {out}")
        return 0

    if args.command == "train":
        dataset = load_labeled_directory(args.data)
        try:
            result = train(dataset, margin=args.margin, lr=args.lr,
                           epochs=args.epochs, dropout=args.dropout,
                           seed=args.seed)
        except InsufficientData as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        save_weights(result.model, args.out)
        print(f"trained {result.epochs_run} epochs; "
              f"val loss {result.initial_val_loss:.4f} -> "
              f"{result.final_val_loss:.4f}; weights at {args.out}")
        if args.embeddings_out:
            write_embeddings(args.embeddings_out,
                             embed_images(result.model, dataset))
            print(f"embeddings at {args.embeddings_out}")
        return 0

    if args.command == "embed":
        model = load_weights(args.weights)
        images = Path(args.images)
        if any(p.is_dir() for p in images.iterdir()):
            dataset = load_labeled_directory(images)
        else:
            from .data import file_sha256, load_image

            dataset = [(file_sha256(p), "", load_image(p))
                       for p in sorted(images.glob("*.png"))]
        if not dataset:
            print("error: no images found", file=sys.stderr)
            return 2
        write_embeddings(args.out, embed_images(model, dataset))
        print(f"embedded {len(dataset)} images -> {args.out}")
        return 0

    raise AssertionError(f"unhandled command {args.command}")


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
