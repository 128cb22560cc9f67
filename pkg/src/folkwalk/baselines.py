"""Comparison recommenders: random, user-based CF, item-based CF, the
tag-extended fusion CF, and the ablation wiring for the walk variants."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Split, TaggingDataset
from .linalg import SparseMatrix, row_normalize
from .similarity import SimilarityConfig, item_similarity, user_similarity
from .walker import WalkConfig, fuse, recommend_all, walk_item, walk_user

ABLATION_KINDS = ("pRW-IT", "pRW-UT", "pRW-UI", "pRW")
ALGORITHM_KINDS = ("Random", "UserCF", "ItemCF", "Fusion") + ABLATION_KINDS


@dataclass(frozen=True)
class AlgorithmSpec:
    """Algorithm selector plus its kind-specific parameters.

    Recognized params: ``seed`` (Random), ``k_neighbors`` (UserCF/ItemCF),
    ``fuse_weight`` (Fusion), ``walk`` (WalkConfig) and ``similarity``
    (SimilarityConfig) for the walk variants.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ALGORITHM_KINDS:
            raise ValueError(f"unknown algorithm kind {self.kind!r}")
        known = {
            "Random": {"seed"},
            "UserCF": {"k_neighbors"},
            "ItemCF": {"k_neighbors"},
            "Fusion": {"fuse_weight"},
        }.get(self.kind, {"walk", "similarity"})
        extra = set(self.params) - known
        if extra:
            raise ValueError(f"unknown params for {self.kind}: {sorted(extra)}")


def _candidate_items(split: Split, user: int) -> list[int]:
    csr = split.train_UI.csr()
    held = set(csr.indices[csr.indptr[user]:csr.indptr[user + 1]])
    return [j for j in range(split.train_UI.cols) if j not in held]


def _rank(scores: np.ndarray, candidates: list[int], top_n: int) -> list[int]:
    return sorted(candidates, key=lambda j: (-scores[j], j))[:top_n]


def random_recommender(split: Split, seed: int, top_n: int) -> dict[int, list[int]]:
    """Uniform sample without replacement from each user's candidate items."""
    rng = np.random.default_rng(seed)
    recs = {}
    for u in range(split.train_UI.rows):
        candidates = _candidate_items(split, u)
        k = min(top_n, len(candidates))
        recs[u] = [int(j) for j in rng.choice(candidates, size=k, replace=False)] if k else []
    return recs


def _cosine(rows: np.ndarray) -> np.ndarray:
    """Pairwise cosine similarity between the rows; zero rows give zero
    similarity; the diagonal is zeroed (no self-neighbors)."""
    norms = np.linalg.norm(rows, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = rows / safe[:, None]
    sim = unit @ unit.T
    np.fill_diagonal(sim, 0.0)
    return sim


def _truncate_neighbors(sim: np.ndarray, k_neighbors: int | None) -> np.ndarray:
    """Keep each row's k largest similarities (ties by lower index); None
    keeps all neighbors."""
    if k_neighbors is None or k_neighbors >= sim.shape[1]:
        return sim
    out = np.zeros_like(sim)
    for i in range(sim.shape[0]):
        order = sorted(range(sim.shape[1]), key=lambda j: (-sim[i, j], j))
        keep = order[:k_neighbors]
        out[i, keep] = sim[i, keep]
    return out


def user_cf_scores(
    train_ui: SparseMatrix, k_neighbors: int | None = None, profile_ext: np.ndarray | None = None
) -> np.ndarray:
    """score(u, j) = sum over neighbors v of sim(u, v) * train[v, j], with
    cosine similarity over user rows (optionally extended with extra profile
    columns that do not contribute to the scored items)."""
    ui = train_ui.to_dense()
    profile = ui if profile_ext is None else np.hstack([ui, profile_ext])
    sim = _truncate_neighbors(_cosine(profile), k_neighbors)
    return sim @ ui


def item_cf_scores(
    train_ui: SparseMatrix, k_neighbors: int | None = None, profile_ext: np.ndarray | None = None
) -> np.ndarray:
    """score(u, j) = sum over u's training items i of sim(i, j), with cosine
    similarity over item columns (optionally extended)."""
    ui = train_ui.to_dense()
    profile = ui.T if profile_ext is None else np.hstack([ui.T, profile_ext])
    sim = _truncate_neighbors(_cosine(profile), k_neighbors)
    return ui @ sim


def _rank_all(split: Split, scores: np.ndarray, top_n: int) -> dict[int, list[int]]:
    return {
        u: _rank(scores[u], _candidate_items(split, u), top_n)
        for u in range(split.train_UI.rows)
    }


def user_cf(split: Split, k_neighbors: int | None = None, top_n: int = 5) -> dict[int, list[int]]:
    return _rank_all(split, user_cf_scores(split.train_UI, k_neighbors), top_n)


def item_cf(split: Split, k_neighbors: int | None = None, top_n: int = 5) -> dict[int, list[int]]:
    return _rank_all(split, item_cf_scores(split.train_UI, k_neighbors), top_n)


def fusion_cf_scores(
    split: Split, ds: TaggingDataset, fuse_weight: float
) -> np.ndarray:
    """Convex combination of user-based CF with tag-extended user profiles
    and item-based CF with tag-extended item profiles. Tags act only as
    profile features; scores cover real items only."""
    if not 0.0 <= fuse_weight <= 1.0:
        raise ValueError(f"fuse_weight must be in [0, 1], got {fuse_weight}")
    user_scores = user_cf_scores(split.train_UI, profile_ext=ds.UT.to_dense())
    item_scores = item_cf_scores(split.train_UI, profile_ext=ds.IT.to_dense())
    return fuse_weight * user_scores + (1.0 - fuse_weight) * item_scores


def fusion_cf(
    split: Split, ds: TaggingDataset, fuse_weight: float = 0.5, top_n: int = 5
) -> dict[int, list[int]]:
    return _rank_all(split, fusion_cf_scores(split, ds, fuse_weight), top_n)


def ablation(
    kind: str,
    split: Split,
    ds: TaggingDataset,
    walk: WalkConfig | None = None,
    similarity: SimilarityConfig | None = None,
    top_n: int = 5,
) -> dict[int, list[int]]:
    """Run one walk variant on the training interactions.

    pRW-IT: tag-only item similarity, item walk alone. pRW-UT: tag-only user
    similarity, user walk alone. pRW-UI: interaction-only similarities, both
    walks fused. pRW: the full configured pipeline.
    """
    if kind not in ABLATION_KINDS:
        raise ValueError(f"unknown ablation kind {kind!r}")
    walk = walk or WalkConfig()
    similarity = similarity or SimilarityConfig()
    alpha, beta, mu = similarity.alpha, similarity.beta, walk.mu
    if kind == "pRW-IT":
        alpha, mu = 1.0, 1.0
    elif kind == "pRW-UT":
        beta, mu = 1.0, 0.0
    elif kind == "pRW-UI":
        alpha, beta = 0.0, 0.0
    ui_norm = row_normalize(split.train_UI)
    if mu > 0.0:
        s_item = item_similarity(ds, alpha, ui=split.train_UI)
        ui_item, _ = walk_item(ui_norm, s_item, walk.eta, walk.tol, walk.max_iters)
    if mu < 1.0:
        s_user = user_similarity(ds, beta, ui=split.train_UI)
        ui_user, _ = walk_user(ui_norm, s_user, walk.lambda_, walk.tol, walk.max_iters)
    if mu == 1.0:
        final = ui_item
    elif mu == 0.0:
        final = ui_user
    else:
        final = fuse(ui_item, ui_user, mu)
    return recommend_all(final, split.train_UI, top_n)


def run_algorithm(
    spec: AlgorithmSpec, split: Split, ds: TaggingDataset, top_n: int
) -> dict[int, list[int]]:
    """Dispatch an algorithm spec; Random defaults its seed to the split's."""
    if spec.kind == "Random":
        return random_recommender(split, spec.params.get("seed", split.seed), top_n)
    if spec.kind == "UserCF":
        return user_cf(split, spec.params.get("k_neighbors"), top_n)
    if spec.kind == "ItemCF":
        return item_cf(split, spec.params.get("k_neighbors"), top_n)
    if spec.kind == "Fusion":
        return fusion_cf(split, ds, spec.params.get("fuse_weight", 0.5), top_n)
    return ablation(
        spec.kind,
        split,
        ds,
        walk=spec.params.get("walk"),
        similarity=spec.params.get("similarity"),
        top_n=top_n,
    )
