"""Exact linear algebra over the rationals.

Matrices are 2-d numpy arrays of ``dtype=object`` holding
:class:`fractions.Fraction` entries, so ``@``, ``+`` and slicing behave as
usual while arithmetic stays exact. Row reduction is fraction-free (Bareiss)
on an integer rescaling of the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import DimensionMismatch, SubspaceNotContained

QMatrix = np.ndarray


def to_q(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        # only accept floats that are exact small rationals, e.g. 0.5
        return Fraction(x).limit_denominator(10**12)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def format_q(x) -> str:
    x = to_q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def qmatrix(rows, shape: tuple[int, int] | None = None) -> QMatrix:
    """Build an object matrix of Fractions from nested rows (or a flat list plus ``shape``)."""
    if shape is not None:
        r, c = shape
        flat = [to_q(x) for x in rows]
        if len(flat) != r * c:
            raise DimensionMismatch(f"expected {r * c} entries, got {len(flat)}")
        out = np.empty((r, c), dtype=object)
        for k, x in enumerate(flat):
            out[k // c, k % c] = x
        return out
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    if any(len(r) != ncols for r in rows):
        raise DimensionMismatch("ragged matrix rows")
    out = np.empty((len(rows), ncols), dtype=object)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            out[i, j] = to_q(x)
    return out


def qvector(xs) -> np.ndarray:
    out = np.empty(len(xs), dtype=object)
    for i, x in enumerate(xs):
        out[i] = to_q(x)
    return out


def qzeros(rows: int, cols: int | None = None) -> QMatrix:
    shape = (rows,) if cols is None else (rows, cols)
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def qeye(n: int) -> QMatrix:
    out = qzeros(n, n)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def is_zero(m) -> bool:
    return all(x == 0 for x in np.asarray(m).flat)


def to_float(m) -> np.ndarray:
    return np.asarray(m, dtype=float)


_INT64_SAFE = 2 ** 62


def _scaled_integers(m) -> tuple[np.ndarray, int]:
    """(N, s) with m = N / s and N an object array of Python ints."""
    m = np.asarray(m, dtype=object)
    flat = [to_q(x) for x in m.flat]
    s = lcm(*(x.denominator for x in flat)) if flat else 1
    out = np.empty(m.shape, dtype=object)
    for k, x in enumerate(flat):
        out.flat[k] = x.numerator * (s // x.denominator)
    return out, s


def _int_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    inner = a.shape[-1]
    amax = max((abs(x) for x in a.flat), default=0)
    bmax = max((abs(x) for x in b.flat), default=0)
    if amax * bmax * max(inner, 1) < _INT64_SAFE:
        return (a.astype(np.int64) @ b.astype(np.int64)).astype(object)
    return a @ b


def matmul(a, b) -> np.ndarray:
    """Exact product of rational matrices (or matrix-vector).

    Same result as ``a @ b`` on Fraction arrays, computed on a common
    integer rescaling; uses machine integers when no overflow is possible.
    """
    na, sa = _scaled_integers(a)
    nb, sb = _scaled_integers(b)
    prod = _int_product(na, nb)
    s = sa * sb
    out = np.empty(prod.shape, dtype=object)
    for k, x in enumerate(prod.flat):
        out.flat[k] = Fraction(int(x), s)
    return out


def product_is_zero(a, b) -> bool:
    """Whether a @ b == 0, without building the Fraction result."""
    na, _ = _scaled_integers(a)
    nb, _ = _scaled_integers(b)
    return not np.any(_int_product(na, nb))


# -- fraction-free elimination ------------------------------------------------

def _integer_rows(m: QMatrix) -> list[list[int]]:
    """Scale each row by the lcm of its denominators; the row space is unchanged."""
    rows = []
    for r in np.asarray(m):
        fr = [to_q(x) for x in r]
        scale = lcm(*(x.denominator for x in fr)) if fr else 1
        rows.append([x.numerator * (scale // x.denominator) for x in fr])
    return rows


def _bareiss(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form. Returns (nonzero echelon rows, pivot columns).

    Every intermediate entry is a minor of the input, so the division by the
    previous pivot is exact.
    """
    a = [list(r) for r in rows]
    nrows = len(a)
    prev = 1
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        row_r = a[r]
        for i in range(r + 1, nrows):
            row_i = a[i]
            f = row_i[c]
            if f == 0:
                if prev != 1 or piv != 1:
                    for j in range(c + 1, ncols):
                        if row_i[j]:
                            row_i[j] = (piv * row_i[j]) // prev
                continue
            for j in range(c + 1, ncols):
                row_i[j] = (piv * row_i[j] - f * row_r[j]) // prev
            row_i[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return a[:r], pivots


def echelon(m: QMatrix) -> tuple[list[list[int]], list[int]]:
    m = np.asarray(m)
    if m.ndim != 2:
        raise DimensionMismatch("echelon expects a matrix")
    return _bareiss(_integer_rows(m), m.shape[1])


def rank(m: QMatrix) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(echelon(m)[1])


def _back_substitute(ech, pivots, ncols, rhs=None, free_values=None):
    """Solve the echelon system exactly; free variables default to zero."""
    x = [Fraction(0)] * ncols
    if free_values:
        for j, v in free_values.items():
            x[j] = Fraction(v)
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        row = ech[r]
        s = Fraction(rhs[r]) if rhs is not None else Fraction(0)
        for j in range(c + 1, ncols):
            if row[j] and x[j]:
                s -= row[j] * x[j]
        x[c] = s / row[c]
    return x


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Linearly independent vectors spanning a subspace of Q^ambient_dim."""

    ambient_dim: int
    vectors: tuple

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def as_columns(self) -> QMatrix:
        out = qzeros(self.ambient_dim, len(self.vectors))
        for j, v in enumerate(self.vectors):
            out[:, j] = v
        return out

    @classmethod
    def from_vectors(cls, ambient_dim: int, vectors) -> "SubspaceBasis":
        vecs = tuple(qvector(v) for v in vectors)
        for v in vecs:
            if len(v) != ambient_dim:
                raise DimensionMismatch("vector length differs from ambient dimension")
        if vecs and rank(np.array(vecs, dtype=object)) != len(vecs):
            raise ValueError("vectors are linearly dependent")
        return cls(ambient_dim, vecs)

    @classmethod
    def standard(cls, n: int) -> "SubspaceBasis":
        return cls(n, tuple(qeye(n)[i].copy() for i in range(n)))


def kernel_basis(m: QMatrix) -> SubspaceBasis:
    """Basis of {v : m v = 0}, one vector per free column of the echelon form."""
    m = np.asarray(m)
    rows, cols = m.shape
    if rows == 0 or cols == 0:
        return SubspaceBasis.standard(cols)
    ech, pivots = echelon(m)
    free = [j for j in range(cols) if j not in set(pivots)]
    vecs = []
    for f in free:
        vecs.append(qvector(_back_substitute(ech, pivots, cols, free_values={f: 1})))
    return SubspaceBasis(cols, tuple(vecs))


def image_basis(m: QMatrix) -> SubspaceBasis:
    """Basis of the column space: the pivot columns of ``m`` itself."""
    m = np.asarray(m)
    rows, cols = m.shape
    if rows == 0 or cols == 0:
        return SubspaceBasis(rows, ())
    _, pivots = echelon(m)
    return SubspaceBasis(rows, tuple(m[:, j].copy() for j in pivots))


def solve(m: QMatrix, b) -> np.ndarray | None:
    """One exact solution x of m x = b, or None if the system is inconsistent."""
    m = np.asarray(m)
    rows, cols = m.shape
    b = qvector(b)
    if len(b) != rows:
        raise DimensionMismatch("right-hand side length differs from row count")
    if cols == 0:
        return qzeros(0) if is_zero(b) else None
    aug = np.empty((rows, cols + 1), dtype=object)
    aug[:, :cols] = m
    aug[:, cols] = b
    ech, pivots = echelon(aug)
    if pivots and pivots[-1] == cols:
        return None
    rhs = [row[cols] for row in ech]
    return qvector(_back_substitute([row[:cols] for row in ech], pivots, cols, rhs=rhs))


def in_span(basis: SubspaceBasis, v) -> bool:
    if basis.dim == 0:
        return is_zero(v)
    return solve(basis.as_columns(), v) is not None


def quotient_basis(sub: SubspaceBasis, big: SubspaceBasis) -> SubspaceBasis:
    """Vectors of ``big`` completing ``sub`` to a basis of span(big).

    Greedy left-to-right selection over the columns [sub | big]; a single
    elimination decides both the completion and the containment check.
    """
    if sub.ambient_dim != big.ambient_dim:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    n = big.ambient_dim
    cols = list(sub.vectors) + list(big.vectors)
    if not cols:
        return SubspaceBasis(n, ())
    mat = qzeros(n, len(cols))
    for j, v in enumerate(cols):
        mat[:, j] = v
    _, pivots = echelon(mat)
    chosen = [j - sub.dim for j in pivots if j >= sub.dim]
    if len(pivots) - sub.dim != len(chosen) or len(pivots) != big.dim:
        raise SubspaceNotContained("span(sub) is not contained in span(big)")
    return SubspaceBasis(n, tuple(big.vectors[j] for j in chosen))


def kronecker(a: QMatrix, b: QMatrix) -> QMatrix:
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    out = qzeros(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])
    br, bc = b.shape
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            if a[i, j] != 0:
                out[i * br:(i + 1) * br, j * bc:(j + 1) * bc] = a[i, j] * b
    return out


def det(m: QMatrix) -> Fraction:
    m = np.asarray(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise DimensionMismatch("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    if n == 1:
        return to_q(m[0, 0])
    if n == 2:
        return to_q(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    a = [[to_q(x) for x in row] for row in m]
    sign = 1
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            sign = -sign
        piv = a[c][c]
        result *= piv
        for i in range(c + 1, n):
            f = a[i][c] / piv
            if f:
                for j in range(c, n):
                    a[i][j] -= f * a[c][j]
    return sign * result


def inverse(m: QMatrix) -> QMatrix:
    m = np.asarray(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise DimensionMismatch("inverse of a non-square matrix")
    if rank(m) < n:
        raise ZeroDivisionError("matrix is singular")
    out = qzeros(n, n)
    e = qeye(n)
    for j in range(n):
        out[:, j] = solve(m, e[:, j])
    return out


def class_coordinates(reps: SubspaceBasis, boundaries: SubspaceBasis, v) -> np.ndarray:
    """Coordinates of ``v`` on ``reps`` modulo span(boundaries).

    Raises SubspaceNotContained when v is outside span(reps) + span(boundaries).
    """
    n = reps.ambient_dim
    k = reps.dim
    cols = list(reps.vectors) + list(boundaries.vectors)
    if not cols:
        if not is_zero(v):
            raise SubspaceNotContained("vector is not in the cocycle space")
        return qzeros(0)
    mat = qzeros(n, len(cols))
    for j, c in enumerate(cols):
        mat[:, j] = c
    x = solve(mat, v)
    if x is None:
        raise SubspaceNotContained("vector is not in the cocycle space")
    return x[:k]
