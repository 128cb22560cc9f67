"""Random-walk-with-restart item recommender for social tagging data."""

from .baselines import AlgorithmSpec
from .dataset import Post, Split, TaggingDataset
from .linalg import SparseMatrix
from .similarity import SimilarityConfig, item_similarity, user_similarity
from .walker import WalkConfig, WalkResult, run_walks

__version__ = "0.1.0"

__all__ = [
    "AlgorithmSpec",
    "Post",
    "SimilarityConfig",
    "SparseMatrix",
    "Split",
    "TaggingDataset",
    "WalkConfig",
    "WalkResult",
    "item_similarity",
    "run_walks",
    "user_similarity",
    "__version__",
]
