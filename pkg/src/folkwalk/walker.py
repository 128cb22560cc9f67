"""Random walks with restart over the item and user graphs.

The item-centric walk iterates X(t+1) = eta * X(t) @ S_item + (1 - eta) * R
from X(0) = R, where R is the row-normalized interaction matrix; the
user-centric walk multiplies from the left with S_user and damping lambda.
Both converge geometrically for damping < 1 and admit closed forms via a
linear solve, kept here as the desk-scale reference path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import ShapeError, SparseMatrix, solve_dense


@dataclass(frozen=True)
class WalkConfig:
    """Hyperparameters for the two walks and their fusion."""

    eta: float = 0.8
    lambda_: float = 0.8
    mu: float = 0.5
    tol: float = 1e-6
    max_iters: int = 100

    def __post_init__(self):
        _check_damping(self.eta, "eta")
        _check_damping(self.lambda_, "lambda")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu must be in [0, 1], got {self.mu}")
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class WalkResult:
    ui_item: SparseMatrix
    ui_user: SparseMatrix
    ui_final: SparseMatrix
    iters_item: int
    iters_user: int
    converged: bool


def _check_damping(value: float, name: str) -> None:
    if not 0.0 <= value < 1.0:
        raise ValueError(f"{name} must be in [0, 1), got {value}")


def _iterate(
    restart: np.ndarray,
    step,
    damping: float,
    tol: float,
    max_iters: int,
    trace: list[float] | None,
) -> tuple[np.ndarray, int, bool]:
    x = restart
    for it in range(1, max_iters + 1):
        x_next = damping * step(x) + (1.0 - damping) * restart
        change = float(np.max(np.abs(x_next - x))) if x.size else 0.0
        if trace is not None:
            trace.append(change)
        x = x_next
        if change < tol:
            return x, it, True
    return x, max_iters, False


def walk_item(
    ui_norm: SparseMatrix,
    s_item: SparseMatrix,
    eta: float,
    tol: float = 1e-6,
    max_iters: int = 100,
    trace: list[float] | None = None,
) -> tuple[SparseMatrix, int]:
    """Item-centric walk; returns the converged score matrix and the number
    of iterations performed. ``trace`` collects per-iteration max-abs changes.
    """
    _check_damping(eta, "eta")
    if s_item.rows != s_item.cols or s_item.rows != ui_norm.cols:
        raise ShapeError(
            f"item similarity {s_item.shape} incompatible with scores {ui_norm.shape}"
        )
    restart = ui_norm.to_dense()
    s = s_item.csr()
    x, iters, _ = _iterate(restart, lambda x: x @ s, eta, tol, max_iters, trace)
    return SparseMatrix.from_dense(x), iters


def walk_user(
    ui_norm: SparseMatrix,
    s_user: SparseMatrix,
    lambda_: float,
    tol: float = 1e-6,
    max_iters: int = 100,
    trace: list[float] | None = None,
) -> tuple[SparseMatrix, int]:
    """User-centric walk: left multiplication by the user similarity."""
    _check_damping(lambda_, "lambda")
    if s_user.rows != s_user.cols or s_user.cols != ui_norm.rows:
        raise ShapeError(
            f"user similarity {s_user.shape} incompatible with scores {ui_norm.shape}"
        )
    restart = ui_norm.to_dense()
    s = s_user.csr()
    x, iters, _ = _iterate(restart, lambda x: s @ x, lambda_, tol, max_iters, trace)
    return SparseMatrix.from_dense(x), iters


def closed_form_item(ui_norm: SparseMatrix, s_item: SparseMatrix, eta: float) -> SparseMatrix:
    """Limit of the item walk: (1 - eta) * R @ (I - eta * S_item)^{-1},
    computed by a right-hand linear solve (never an explicit inverse)."""
    _check_damping(eta, "eta")
    a = np.eye(s_item.rows) - eta * s_item.to_dense()
    x = solve_dense(a, (1.0 - eta) * ui_norm.to_dense(), side="right")
    return SparseMatrix.from_dense(x)


def closed_form_user(ui_norm: SparseMatrix, s_user: SparseMatrix, lambda_: float) -> SparseMatrix:
    """Limit of the user walk: (1 - lambda) * (I - lambda * S_user)^{-1} @ R."""
    _check_damping(lambda_, "lambda")
    a = np.eye(s_user.rows) - lambda_ * s_user.to_dense()
    x = solve_dense(a, (1.0 - lambda_) * ui_norm.to_dense(), side="left")
    return SparseMatrix.from_dense(x)


def fuse(ui_item: SparseMatrix, ui_user: SparseMatrix, mu: float) -> SparseMatrix:
    """Entrywise convex combination mu * item scores + (1 - mu) * user scores."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must be in [0, 1], got {mu}")
    if ui_item.shape != ui_user.shape:
        raise ShapeError(f"shape mismatch {ui_item.shape} vs {ui_user.shape}")
    return SparseMatrix.from_dense(
        mu * ui_item.to_dense() + (1.0 - mu) * ui_user.to_dense()
    )


def run_walks(
    ui_norm: SparseMatrix,
    s_item: SparseMatrix,
    s_user: SparseMatrix,
    config: WalkConfig,
) -> WalkResult:
    """Run both walks and fuse their converged score matrices."""
    trace_item: list[float] = []
    trace_user: list[float] = []
    ui_item, iters_item = walk_item(
        ui_norm, s_item, config.eta, config.tol, config.max_iters, trace=trace_item
    )
    ui_user, iters_user = walk_user(
        ui_norm, s_user, config.lambda_, config.tol, config.max_iters, trace=trace_user
    )
    return WalkResult(
        ui_item=ui_item,
        ui_user=ui_user,
        ui_final=fuse(ui_item, ui_user, config.mu),
        iters_item=iters_item,
        iters_user=iters_user,
        converged=trace_item[-1] < config.tol and trace_user[-1] < config.tol,
    )


def recommend(
    ui_final: SparseMatrix,
    train_ui: SparseMatrix,
    user: int,
    top_n: int,
) -> list[int]:
    """Top-N items for one user by descending score, excluding training
    items; ties broken by ascending item index."""
    if not 0 <= user < ui_final.rows:
        raise IndexError(f"user index {user} out of range [0, {ui_final.rows})")
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    scores = np.asarray(ui_final.csr()[user].todense()).ravel()
    train_csr = train_ui.csr()
    held = set(train_csr.indices[train_csr.indptr[user]:train_csr.indptr[user + 1]])
    candidates = [j for j in range(ui_final.cols) if j not in held]
    candidates.sort(key=lambda j: (-scores[j], j))
    return candidates[:top_n]


def recommend_all(
    ui_final: SparseMatrix, train_ui: SparseMatrix, top_n: int
) -> dict[int, list[int]]:
    return {
        u: recommend(ui_final, train_ui, u, top_n) for u in range(ui_final.rows)
    }


def write_trace_csv(trace: list[float], path: str) -> None:
    """Convergence trace as ``iteration,max_abs_change`` CSV."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("iteration,max_abs_change\n")
        for it, change in enumerate(trace, start=1):
            fh.write(f"{it},{change:.17g}\n")
