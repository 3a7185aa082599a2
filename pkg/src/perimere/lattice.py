"""Exact integer-lattice arithmetic.

Sublattices of Z^d are kept in a canonical column-style Hermite normal form
so that two values describe the same lattice iff they compare equal.  All
integer work uses Python's unbounded ints (intermediate entries during
reduction can grow like (2N)^(c^(d-1)), far beyond 64 bits); only volumes
and the real change-of-basis matrix live in floating point.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_ENUMERATION_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    """A brute-force enumeration would exceed the configured point budget."""


def _pivot_row(col) -> int:
    for r, e in enumerate(col):
        if e:
            return r
    raise ValueError("zero column has no pivot")


def _int_det(rows) -> int:
    """Exact determinant of a square integer matrix (Bareiss)."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


@dataclass(frozen=True)
class IntMatrix:
    """Integer matrix stored column-wise with unbounded entries."""

    rows: int
    columns: tuple

    def __post_init__(self):
        if self.rows < 1:
            raise ValueError("matrix needs at least one row")
        for col in self.columns:
            if len(col) != self.rows:
                raise ValueError("column length does not match row count")

    @classmethod
    def from_columns(cls, columns: Iterable[Sequence[int]], rows: int | None = None) -> "IntMatrix":
        cols = tuple(tuple(int(e) for e in col) for col in columns)
        if rows is None:
            if not cols:
                raise ValueError("row count required for an empty matrix")
            rows = len(cols[0])
        return cls(rows, cols)

    @classmethod
    def from_rows(cls, row_seq: Iterable[Sequence[int]]) -> "IntMatrix":
        rows = [tuple(int(e) for e in r) for r in row_seq]
        if not rows:
            raise ValueError("matrix needs at least one row")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        cols = tuple(tuple(r[j] for r in rows) for j in range(ncols))
        return cls(len(rows), cols)

    @property
    def cols(self) -> int:
        return len(self.columns)

    def magnitude(self) -> int:
        return max((abs(e) for col in self.columns for e in col), default=0)

    def det(self) -> int:
        if self.cols != self.rows:
            raise ValueError("determinant of a non-square matrix")
        return _int_det([[self.columns[j][i] for j in range(self.rows)] for i in range(self.rows)])


_EMPTY_CACHE: dict = {}


@dataclass(frozen=True)
class SublatticeBasis:
    """Canonical HNF basis of a sublattice of Z^dim.

    Each column has strictly more leading zeros than its predecessor, pivots
    are positive, and entries left of a pivot in its row lie in [0, pivot).
    Equality of two values is equality of the spanned lattices.
    """

    dim: int
    columns: tuple

    @property
    def rank(self) -> int:
        return len(self.columns)

    @property
    def is_full(self) -> bool:
        """True iff this is all of Z^dim (HNF = identity)."""
        if len(self.columns) != self.dim:
            return False
        return all(col[i] == 1 for i, col in enumerate(self.columns))

    def magnitude(self) -> int:
        return max((abs(e) for col in self.columns for e in col), default=0)

    def pivots(self):
        return [(_pivot_row(col), col[_pivot_row(col)]) for col in self.columns]

    @classmethod
    def empty(cls, dim: int) -> "SublatticeBasis":
        cached = _EMPTY_CACHE.get(dim)
        if cached is None:
            cached = _EMPTY_CACHE[dim] = cls(dim, ())
        return cached

    @classmethod
    def full(cls, dim: int) -> "SublatticeBasis":
        cols = tuple(tuple(1 if i == j else 0 for i in range(dim)) for j in range(dim))
        return cls(dim, cols)


def _hnf_columns(dim: int, columns, with_transform: bool = False):
    """Column-operation HNF reduction (negate / swap / subtract a multiple).

    Returns (basis_columns, all_columns, transform) where transform[k] gives
    integer coefficients x with  input_matrix . x = all_columns[k]; the
    trailing all-zero columns therefore index a basis of the integer kernel.
    """
    cols = [list(c) for c in columns]
    c = len(cols)
    trans = [[1 if i == k else 0 for i in range(c)] for k in range(c)] if with_transform else None
    j = 0
    for i in range(dim):
        pivot = None
        for l in range(j, c):
            if cols[l][i]:
                pivot = l
                break
        if pivot is None:
            continue
        cols[j], cols[pivot] = cols[pivot], cols[j]
        if trans is not None:
            trans[j], trans[pivot] = trans[pivot], trans[j]
        if cols[j][i] < 0:
            cols[j] = [-e for e in cols[j]]
            if trans is not None:
                trans[j] = [-e for e in trans[j]]
        for k in range(j + 1, c):
            if cols[k][i] < 0:
                cols[k] = [-e for e in cols[k]]
                if trans is not None:
                    trans[k] = [-e for e in trans[k]]
            # Euclid on the i-th entries of columns j and k.
            while cols[j][i] and cols[k][i]:
                q = cols[j][i] // cols[k][i]
                if q:
                    cols[j] = [a - q * b for a, b in zip(cols[j], cols[k])]
                    if trans is not None:
                        trans[j] = [a - q * b for a, b in zip(trans[j], trans[k])]
                cols[j], cols[k] = cols[k], cols[j]
                if trans is not None:
                    trans[j], trans[k] = trans[k], trans[j]
            if cols[j][i] == 0 and cols[k][i]:
                cols[j], cols[k] = cols[k], cols[j]
                if trans is not None:
                    trans[j], trans[k] = trans[k], trans[j]
        # canonical: entries left of the pivot reduced into [0, pivot)
        for k in range(j):
            q = cols[k][i] // cols[j][i]
            if q:
                cols[k] = [a - q * b for a, b in zip(cols[k], cols[j])]
                if trans is not None:
                    trans[k] = [a - q * b for a, b in zip(trans[k], trans[j])]
        j += 1
    basis = tuple(tuple(col) for col in cols[:j])
    if with_transform:
        return basis, [tuple(col) for col in cols], [tuple(t) for t in trans]
    return basis, None, None


def hnf_reduce(matrix, dim: int | None = None) -> SublatticeBasis:
    """Canonical HNF basis of the lattice spanned by the columns of `matrix`.

    Accepts an IntMatrix or a plain iterable of integer columns (pass `dim`
    when the column list may be empty).  Redundant, zero, and negative
    columns are all fine.
    """
    if isinstance(matrix, SublatticeBasis):
        return matrix
    if isinstance(matrix, IntMatrix):
        cols, d = matrix.columns, matrix.rows
    else:
        cols = tuple(tuple(int(e) for e in col) for col in matrix)
        if cols:
            d = len(cols[0])
            if any(len(c) != d for c in cols):
                raise ValueError("ragged columns")
        elif dim is None:
            raise ValueError("dim required for an empty column list")
        else:
            d = dim
        if dim is not None and cols and d != dim:
            raise ValueError("columns do not match dim")
    basis, _, _ = _hnf_columns(d, cols)
    return SublatticeBasis(d, basis)


def hnf_transform(matrix: IntMatrix):
    """HNF basis plus integer certificates: basis[k] = matrix . coeffs[k]."""
    basis, _, trans = _hnf_columns(matrix.rows, matrix.columns, with_transform=True)
    return SublatticeBasis(matrix.rows, basis), [trans[k] for k in range(len(basis))]


def lattice_sum(a: SublatticeBasis, b: SublatticeBasis) -> SublatticeBasis:
    """Smallest common superlattice A + B."""
    if a.dim != b.dim:
        raise ValueError("ambient dimension mismatch")
    if not b.columns:
        return a
    if not a.columns:
        return b
    if a == b:
        return a
    basis, _, _ = _hnf_columns(a.dim, a.columns + b.columns)
    return SublatticeBasis(a.dim, basis)


def solve(l: SublatticeBasis, v: Sequence[int]):
    """Integer coefficients x with  l.columns . x = v, or None.

    Back-substitution along pivot rows; each step is an exact divisibility
    check, so a non-None result is a certificate.
    """
    if len(v) != l.dim:
        raise ValueError("vector length does not match ambient dimension")
    w = [int(e) for e in v]
    coeffs = []
    for col in l.columns:
        r = _pivot_row(col)
        q, rem = divmod(w[r], col[r])
        if rem:
            return None
        if q:
            w = [a - q * b for a, b in zip(w, col)]
        coeffs.append(q)
    if any(w):
        return None
    return tuple(coeffs)


def member(l: SublatticeBasis, v: Sequence[int]) -> bool:
    """True iff v is an integer combination of l's columns."""
    return solve(l, v) is not None


def intersection(a: SublatticeBasis, b: SublatticeBasis) -> SublatticeBasis:
    """Lattice of vectors lying in both A and B.

    Solves A.x = B.y over the integers via the kernel of the stacked matrix
    [A | -B] and projects the solutions to A.x.
    """
    if a.dim != b.dim:
        raise ValueError("ambient dimension mismatch")
    if not a.columns or not b.columns:
        return SublatticeBasis.empty(a.dim)
    if a == b:
        return a
    stacked = a.columns + tuple(tuple(-e for e in col) for col in b.columns)
    basis, _, trans = _hnf_columns(a.dim, stacked, with_transform=True)
    pa = len(a.columns)
    vecs = []
    for k in range(len(basis), len(stacked)):
        x = trans[k][:pa]
        vecs.append(tuple(sum(x[i] * a.columns[i][r] for i in range(pa)) for r in range(a.dim)))
    return hnf_reduce(vecs, dim=a.dim)


class RealBasis:
    """Real d x d basis matrix U (columns are lattice vectors) with caches.

    Caches the inverse, the operator norm of the inverse (largest singular
    value), and vol_d = |det U|.  When every entry is an exact integer, an
    integer copy is kept so sublattice volumes come out of exact Gram
    determinants.
    """

    __slots__ = ("dim", "matrix", "inverse", "volume", "inverse_norm", "int_columns")

    def __init__(self, columns):
        u = np.array([[float(e) for e in col] for col in columns], dtype=float).T
        if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] < 1:
            raise ValueError("basis must be a square d x d matrix, d >= 1")
        self.dim = u.shape[0]
        self.matrix = u
        det = np.linalg.det(u)
        if det == 0.0 or not np.isfinite(det):
            raise ValueError("singular lattice basis")
        self.inverse = np.linalg.inv(u)
        if np.max(np.abs(u @ self.inverse - np.eye(self.dim))) > 1e-12:
            raise ValueError("basis too ill-conditioned to invert reliably")
        ints = None
        if all(float(e).is_integer() for col in columns for e in col):
            ints = tuple(tuple(int(e) for e in col) for col in columns)
        self.int_columns = ints
        if ints is not None:
            self.volume = float(abs(_int_det([[ints[j][i] for j in range(self.dim)] for i in range(self.dim)])))
        else:
            self.volume = float(abs(det))
        self.inverse_norm = self._largest_singular_value(self.inverse)

    @staticmethod
    def _largest_singular_value(m: np.ndarray) -> float:
        gram = m.T @ m
        if m.shape[0] <= 8:
            return float(math.sqrt(max(np.linalg.eigvalsh(gram)[-1], 0.0)))
        # power iteration for larger dimensions
        v = np.ones(m.shape[0]) / math.sqrt(m.shape[0])
        for _ in range(200):
            w = gram @ v
            nw = np.linalg.norm(w)
            if nw == 0.0:
                return 0.0
            v = w / nw
        return float(math.sqrt(v @ gram @ v))

    def columns(self):
        return [tuple(self.matrix[:, j]) for j in range(self.dim)]


def volume(u: RealBasis, l: SublatticeBasis) -> float:
    """p-dimensional volume of the unit cell of the real lattice U . L.

    sqrt(det(G^T G)) with G = U . columns(L); the rank-0 lattice has
    volume 1 by convention.
    """
    p = l.rank
    if p == 0:
        return 1.0
    if u.int_columns is not None:
        ucols = u.int_columns
        d = u.dim
        g = [[sum(ucols[c][r] * col[c] for c in range(d)) for r in range(d)] for col in l.columns]
        gram = [[sum(g[i][r] * g[j][r] for r in range(d)) for j in range(p)] for i in range(p)]
        return math.sqrt(_int_det(gram))
    g = u.matrix @ np.array(l.columns, dtype=float).T
    gram = g.T @ g
    return float(math.sqrt(max(np.linalg.det(gram), 0.0)))


def unit_ball_volume(q: int) -> float:
    """Volume of the q-dimensional unit ball: pi^(q/2) / Gamma(q/2 + 1)."""
    if q < 0:
        raise ValueError("dimension must be non-negative")
    return math.pi ** (q / 2) / math.gamma(q / 2 + 1)


def coset_reps(s: IntMatrix):
    """Canonical representatives of Z^d modulo S.Z^d (exactly |det S| many)."""
    if s.cols != s.rows:
        raise ValueError("sublattice matrix must be square")
    h = hnf_reduce(s)
    if h.rank != s.rows:
        raise ValueError("singular sublattice matrix")
    # full rank forces one pivot per row, so H is lower triangular and the
    # canonical transversal is the set of digit vectors below the pivots.
    return [tuple(digits) for digits in itertools.product(*(range(col[i]) for i, col in enumerate(h.columns)))]


def reduce_mod(l: SublatticeBasis, v: Sequence[int]):
    """Canonical representative of v modulo the lattice L (pivot-row reduction)."""
    w = [int(e) for e in v]
    for col in l.columns:
        r = _pivot_row(col)
        q = w[r] // col[r]
        if q:
            w = [a - q * b for a, b in zip(w, col)]
    return tuple(w)


def canonical_coset(s: IntMatrix, v: Sequence[int]):
    """The unique coset_reps(S) element congruent to v modulo S.Z^d."""
    if s.cols != s.rows:
        raise ValueError("sublattice matrix must be square")
    h = hnf_reduce(s)
    if h.rank != s.rows:
        raise ValueError("singular sublattice matrix")
    if len(v) != s.rows:
        raise ValueError("vector length does not match dimension")
    return reduce_mod(h, v)


def count_cosets_in_ball(u: RealBasis, l: SublatticeBasis, radius: float,
                         budget: int = DEFAULT_ENUMERATION_BUDGET) -> int:
    """Brute-force count of elements of Lambda/Lambda_C meeting the R-ball.

    Enumerates the integer coordinates of all lattice points U.n with
    ||U.n|| <= R and deduplicates them by canonical reduction along L's
    pivot rows.  Raises BudgetExceeded if the enclosing coordinate box
    holds more than `budget` points.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if l.dim != u.dim:
        raise ValueError("ambient dimension mismatch")
    d = u.dim
    bounds = [int(math.floor(np.linalg.norm(u.inverse[i, :]) * radius + 1e-9)) for i in range(d)]
    total = 1
    for b in bounds:
        total *= 2 * b + 1
    if total > budget:
        raise BudgetExceeded(f"enumeration box of {total} points exceeds budget {budget}")
    axes = [np.arange(-b, b + 1, dtype=np.int64) for b in bounds]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    real = pts @ u.matrix.T
    keep = pts[np.einsum("ij,ij->i", real, real) <= radius * radius + 1e-9]
    for col in l.columns:
        r = _pivot_row(col)
        q = keep[:, r] // col[r]
        keep = keep - q[:, None] * np.array(col, dtype=np.int64)
    return int(np.unique(keep, axis=0).shape[0])
