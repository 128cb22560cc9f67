"""Sparse real-matrix kernel.

Storage is CSR (scipy) behind an immutable :class:`SparseMatrix` wrapper.
Provides the small set of operations the recommender pipeline needs: row
normalization, products, transpose, and a dense partial-pivot LU solver used
by the closed-form walk paths. All functions are pure; matrices are never
mutated after construction.
"""

from __future__ import annotations

import warnings
from collections.abc import Iterable

import numpy as np
import scipy.linalg
import scipy.sparse as sp

PIVOT_EPS = 1e-12


class ShapeError(ValueError):
    """Operand dimensions are incompatible."""


class NegativeEntryError(ValueError):
    """A non-negative matrix contains a negative entry."""


class SingularMatrixError(ArithmeticError):
    """Dense solve hit a pivot below the singularity threshold."""


class SparseMatrix:
    """Immutable sparse real matrix with explicit dimensions.

    Invariants enforced at construction: no duplicate coordinates, indices
    within the declared shape, all values finite. Explicitly stored zeros
    are dropped, so the stored pattern equals the nonzero pattern.
    """

    __slots__ = ("_csr",)

    def __init__(self, rows: int, cols: int, entries: Iterable[tuple[int, int, float]] = ()):
        if rows < 0 or cols < 0:
            raise ShapeError(f"negative dimensions ({rows}, {cols})")
        triples = list(entries)
        if triples:
            i = np.asarray([t[0] for t in triples], dtype=np.int64)
            j = np.asarray([t[1] for t in triples], dtype=np.int64)
            v = np.asarray([t[2] for t in triples], dtype=np.float64)
            if i.min() < 0 or j.min() < 0 or i.max() >= rows or j.max() >= cols:
                raise ShapeError(f"entry index out of bounds for shape ({rows}, {cols})")
            flat = i * cols + j
            if len(np.unique(flat)) != len(flat):
                raise ValueError("duplicate (row, col) coordinates in entry list")
            if not np.all(np.isfinite(v)):
                raise ValueError("non-finite value in entry list")
            mat = sp.coo_matrix((v, (i, j)), shape=(rows, cols)).tocsr()
            mat.eliminate_zeros()
        else:
            mat = sp.csr_matrix((rows, cols), dtype=np.float64)
        self._csr = mat

    @classmethod
    def _wrap(cls, mat: sp.spmatrix) -> "SparseMatrix":
        """Wrap a scipy matrix produced by a trusted internal operation."""
        obj = cls.__new__(cls)
        csr = sp.csr_matrix(mat, dtype=np.float64)
        csr.eliminate_zeros()
        if csr.nnz and not np.all(np.isfinite(csr.data)):
            raise ValueError("non-finite value produced by matrix operation")
        obj._csr = csr
        return obj

    @classmethod
    def from_dense(cls, array: np.ndarray | list) -> "SparseMatrix":
        arr = np.asarray(array, dtype=np.float64)
        if arr.ndim != 2:
            raise ShapeError(f"expected a 2-d array, got ndim={arr.ndim}")
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("non-finite value in dense input")
        return cls._wrap(sp.csr_matrix(arr))

    @property
    def rows(self) -> int:
        return self._csr.shape[0]

    @property
    def cols(self) -> int:
        return self._csr.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._csr.shape

    @property
    def nnz(self) -> int:
        return self._csr.nnz

    @property
    def entries(self) -> list[tuple[int, int, float]]:
        """Stored entries as (row, col, value), sorted by (row, col)."""
        coo = self._csr.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [
            (int(coo.row[k]), int(coo.col[k]), float(coo.data[k]))
            for k in order
        ]

    def csr(self) -> sp.csr_matrix:
        """Read-only view of the underlying CSR storage."""
        return self._csr

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray()

    def row_sums(self) -> np.ndarray:
        return np.asarray(self._csr.sum(axis=1)).ravel()

    def __repr__(self) -> str:
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


def identity(n: int) -> SparseMatrix:
    return SparseMatrix._wrap(sp.identity(n, format="csr"))


def row_normalize(m: SparseMatrix) -> SparseMatrix:
    """Scale each row to unit sum; rows with no entries stay all-zero.

    Raises :class:`NegativeEntryError` if any entry is negative, naming the
    offending coordinate.
    """
    csr = m.csr()
    if csr.nnz and csr.data.min() < 0:
        coo = csr.tocoo()
        k = int(np.argmin(coo.data))
        raise NegativeEntryError(
            f"negative entry {coo.data[k]} at ({coo.row[k]}, {coo.col[k]})"
        )
    sums = np.asarray(csr.sum(axis=1)).ravel()
    scale = np.divide(1.0, sums, out=np.zeros_like(sums), where=sums > 0)
    return SparseMatrix._wrap(sp.diags(scale) @ csr)


def matmul(a: SparseMatrix, b: SparseMatrix, drop_tol: float = 0.0) -> SparseMatrix:
    """Sparse product A @ B; entries with |value| < drop_tol are pruned."""
    if a.cols != b.rows:
        raise ShapeError(
            f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}"
        )
    c = a.csr() @ b.csr()
    if drop_tol > 0.0:
        c.data[np.abs(c.data) < drop_tol] = 0.0
    return SparseMatrix._wrap(c)


def transpose(m: SparseMatrix) -> SparseMatrix:
    return SparseMatrix._wrap(m.csr().T)


def lincomb(wa: float, a: SparseMatrix, wb: float, b: SparseMatrix) -> SparseMatrix:
    """Entrywise wa * A + wb * B."""
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    return SparseMatrix._wrap(wa * a.csr() + wb * b.csr())


def solve_dense(a: np.ndarray, b: np.ndarray, side: str = "left") -> np.ndarray:
    """Solve A @ X = B (side="left") or X @ A = B (side="right") by LU.

    Uses partial-pivot LU; a pivot with absolute value below ``PIVOT_EPS``
    raises :class:`SingularMatrixError`. Intended for desk-scale validation
    and closed-form paths, not large systems.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"coefficient matrix must be square, got {a.shape}")
    if side == "right":
        return solve_dense(a.T, np.atleast_2d(b).T, side="left").T
    if side != "left":
        raise ValueError(f"unknown side {side!r}")
    b2 = np.atleast_2d(b)
    if b2.shape[0] != a.shape[0]:
        raise ShapeError(f"rhs rows {b2.shape[0]} != system size {a.shape[0]}")
    with warnings.catch_warnings():
        # singularity is reported via SingularMatrixError below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
    if np.abs(np.diag(lu)).min() < PIVOT_EPS:
        raise SingularMatrixError(
            f"pivot below {PIVOT_EPS:g}; matrix is singular or near-singular"
        )
    x = scipy.linalg.lu_solve((lu, piv), b2)
    return x if b.ndim == 2 else x.ravel()
