"""visualbait: trains the first-page embedding model and emits the
embeddings.tsv exchange file consumed by the clustering pipeline."""

__version__ = "0.1.0"

from .model import EmbeddingNet, build_model, layer_output_sizes
from .loss import TripletBatch, mine_semihard, triplet_loss
from .train import TrainResult, train

__all__ = [
    "EmbeddingNet", "build_model", "layer_output_sizes",
    "TripletBatch", "mine_semihard", "triplet_loss",
    "TrainResult", "train",
]
