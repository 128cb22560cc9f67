"""Transition-probability similarity matrices.

The item similarity blends two two-hop transition chains: item -> tag -> item
(from the item-tag matrix) and item -> user -> item (from the interaction
matrix). Each hop is row-normalized over its target set, so every chain is
row-stochastic wherever the data gives the row any support. The user
similarity mirrors this with user -> tag -> user and user -> item -> user
chains.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dataset import TaggingDataset
from .linalg import SparseMatrix, lincomb, matmul, row_normalize, transpose


@dataclass(frozen=True)
class SimilarityConfig:
    alpha: float = 0.5
    beta: float = 0.5

    def __post_init__(self):
        _check_weight(self.alpha, "alpha")
        _check_weight(self.beta, "beta")


def _check_weight(value: float, name: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")


def _two_hop(out_hop: SparseMatrix, back_hop: SparseMatrix) -> SparseMatrix:
    """rownorm(out_hop) @ rownorm(back_hop): probability of a two-step jump."""
    return matmul(row_normalize(out_hop), row_normalize(back_hop))


def _blend(weight: float, first: SparseMatrix, second: SparseMatrix) -> SparseMatrix:
    if weight == 1.0:
        return first
    if weight == 0.0:
        return second
    return lincomb(weight, first, 1.0 - weight, second)


def item_similarity(
    ds: TaggingDataset, alpha: float, ui: SparseMatrix | None = None
) -> SparseMatrix:
    """n x n item transition matrix.

    alpha weights the tag chain rownorm(IT) @ rownorm(IT^T) against the
    interaction chain rownorm(UI^T) @ rownorm(UI). ``ui`` overrides the
    dataset's interaction matrix (used to restrict to training interactions).
    """
    _check_weight(alpha, "alpha")
    ui = ds.UI if ui is None else ui
    n = ds.num_items
    # a completely empty component contributes no chain at all; its weight
    # falls to the other component so tag-free data degrades gracefully
    if ds.IT.nnz == 0:
        alpha = 0.0
    elif ui.nnz == 0:
        alpha = 1.0
    tag_chain = (
        _two_hop(ds.IT, transpose(ds.IT)) if alpha > 0.0 else SparseMatrix(n, n)
    )
    user_chain = (
        _two_hop(transpose(ui), ui) if alpha < 1.0 else SparseMatrix(n, n)
    )
    return _blend(alpha, tag_chain, user_chain)


def user_similarity(
    ds: TaggingDataset, beta: float, ui: SparseMatrix | None = None
) -> SparseMatrix:
    """m x m user transition matrix; mirror of :func:`item_similarity` with
    chains rownorm(UT) @ rownorm(UT^T) and rownorm(UI) @ rownorm(UI^T)."""
    _check_weight(beta, "beta")
    ui = ds.UI if ui is None else ui
    m = ds.num_users
    if ds.UT.nnz == 0:
        beta = 0.0
    elif ui.nnz == 0:
        beta = 1.0
    tag_chain = (
        _two_hop(ds.UT, transpose(ds.UT)) if beta > 0.0 else SparseMatrix(m, m)
    )
    item_chain = (
        _two_hop(ui, transpose(ui)) if beta < 1.0 else SparseMatrix(m, m)
    )
    return _blend(beta, tag_chain, item_chain)


def dump_coordinates(mat: SparseMatrix, path: str) -> None:
    """Write the matrix as ``row col value`` lines for inspection."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {mat.rows} {mat.cols}\n")
        for i, j, v in mat.entries:
            fh.write(f"{i} {j} {v:.17g}\n")
