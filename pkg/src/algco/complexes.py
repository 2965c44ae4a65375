"""Finite cochain complexes over Q, chain maps and their cohomology."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qlinalg as ql
from .errors import DimensionMismatch, NotAComplex
from .qlinalg import SubspaceBasis


@dataclass(frozen=True, eq=False)
class GenericComplex:
    """0 -> C^0 -> C^1 -> ... -> C^N -> 0 with ``diff[k]: C^k -> C^{k+1}``."""

    dims: tuple
    diff: tuple

    def __post_init__(self):
        if len(self.diff) != max(len(self.dims) - 1, 0):
            raise DimensionMismatch("need exactly one differential between consecutive degrees")
        for k, d in enumerate(self.diff):
            if d.shape != (self.dims[k + 1], self.dims[k]):
                raise DimensionMismatch(
                    f"d_{k} has shape {d.shape}, expected {(self.dims[k + 1], self.dims[k])}"
                )

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def dim(self, k: int) -> int:
        """dim C^k, zero outside the stored range."""
        return self.dims[k] if 0 <= k <= self.top else 0

    def d(self, k: int) -> np.ndarray:
        """d_k, including the zero maps into and out of the ends."""
        if 0 <= k < len(self.diff):
            return self.diff[k]
        return ql.qzeros(self.dim(k + 1), self.dim(k))

    def square_defects(self) -> list[int]:
        """Degrees k with d_{k+1} d_k != 0."""
        return [k for k in range(len(self.diff) - 1)
                if not ql.product_is_zero(self.diff[k + 1], self.diff[k])]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.dims))


def generic_complex(dims, diffs, check: bool = True) -> GenericComplex:
    c = GenericComplex(tuple(dims), tuple(diffs))
    if check:
        bad = c.square_defects()
        if bad:
            raise NotAComplex(f"d^2 != 0 starting in degree {bad[0]}")
    return c


@dataclass(frozen=True, eq=False)
class CohomologyResult:
    betti: tuple
    representatives: tuple
    cocycles: tuple
    coboundaries: tuple

    @property
    def cocycle_dims(self) -> tuple:
        return tuple(z.dim for z in self.cocycles)

    @property
    def coboundary_dims(self) -> tuple:
        return tuple(b.dim for b in self.coboundaries)

    def class_of(self, k: int, v) -> np.ndarray:
        """Coordinates of the class of the cocycle ``v`` in the representative basis of H^k."""
        return ql.class_coordinates(self.representatives[k], self.coboundaries[k], v)

    def is_exact(self, k: int, v) -> bool:
        return ql.in_span(self.coboundaries[k], v)

    def to_json(self, representatives: bool = False) -> dict:
        out = {
            "betti": list(self.betti),
            "cocycle_dims": list(self.cocycle_dims),
            "coboundary_dims": list(self.coboundary_dims),
        }
        if representatives:
            out["representatives"] = [
                [[ql.format_q(x) for x in v] for v in reps] for reps in self.representatives
            ]
        return out


def complex_cohomology(c: GenericComplex) -> CohomologyResult:
    bad = c.square_defects()
    if bad:
        raise NotAComplex(f"d^2 != 0 starting in degree {bad[0]}")
    betti, reps, zs, bs = [], [], [], []
    for k, n in enumerate(c.dims):
        z = ql.kernel_basis(c.diff[k]) if k < len(c.diff) else SubspaceBasis.standard(n)
        b = ql.image_basis(c.diff[k - 1]) if k > 0 else SubspaceBasis(n, ())
        r = ql.quotient_basis(b, z)
        betti.append(r.dim)
        reps.append(r)
        zs.append(z)
        bs.append(b)
    return CohomologyResult(tuple(betti), tuple(reps), tuple(zs), tuple(bs))


@dataclass(frozen=True, eq=False)
class ChainMap:
    """Degree-wise maps f_k: source^k -> target^k; the complexes may differ in length."""

    source: GenericComplex
    target: GenericComplex
    maps: tuple

    def __post_init__(self):
        for k, m in enumerate(self.maps):
            if m.shape != (self.target.dim(k), self.source.dim(k)):
                raise DimensionMismatch(f"chain map in degree {k} has wrong shape {m.shape}")

    def commutation_defects(self) -> list[int]:
        """Degrees k where d' f_k != f_{k+1} d."""
        bad = []
        for k in range(len(self.maps) - 1):
            lhs = ql.matmul(self.target.d(k), self.maps[k])
            rhs = ql.matmul(self.maps[k + 1], self.source.d(k))
            if not ql.is_zero(lhs - rhs):
                bad.append(k)
        return bad

    def is_chain_map(self) -> bool:
        return not self.commutation_defects()

    def induced(self, k: int, hs: CohomologyResult, ht: CohomologyResult) -> np.ndarray:
        """Matrix of H^k(f) in the representative bases."""
        if k >= len(hs.betti) or k >= len(ht.betti):
            return ql.qzeros(ht.betti[k] if k < len(ht.betti) else 0,
                             hs.betti[k] if k < len(hs.betti) else 0)
        reps = hs.representatives[k]
        out = ql.qzeros(ht.betti[k], reps.dim)
        for j, v in enumerate(reps.vectors):
            out[:, j] = ht.class_of(k, self.maps[k] @ v)
        return out

    def compose(self, inner: "ChainMap") -> "ChainMap":
        """self o inner."""
        return ChainMap(inner.source, self.target,
                        tuple(a @ b for a, b in zip(self.maps, inner.maps)))


@dataclass(frozen=True, eq=False)
class TensorComplex(GenericComplex):
    """Tensor product complex; ``blocks[n]`` lists (p, q, offset) of C^p x D^q inside Tot^n."""

    blocks: tuple = field(default=())


def tensor_complex(c: GenericComplex, d: GenericComplex) -> TensorComplex:
    """Tot^n = sum_{p+q=n} C^p x D^q with D(x y) = dx y + (-1)^p x dy.

    Kronecker ordering inside each block, blocks ordered by increasing p.
    """
    top = c.top + d.top
    blocks, dims = [], []
    for n in range(top + 1):
        off, row = 0, []
        for p in range(max(0, n - d.top), min(n, c.top) + 1):
            q = n - p
            row.append((p, q, off))
            off += c.dims[p] * d.dims[q]
        blocks.append(tuple(row))
        dims.append(off)
    diffs = []
    for n in range(top):
        m = ql.qzeros(dims[n + 1], dims[n])
        tgt = {(p, q): o for p, q, o in blocks[n + 1]}
        for p, q, off in blocks[n]:
            w = c.dims[p] * d.dims[q]
            if (p + 1, q) in tgt:
                o2 = tgt[(p + 1, q)]
                blk = ql.kronecker(c.d(p), ql.qeye(d.dims[q]))
                m[o2:o2 + blk.shape[0], off:off + w] += blk
            if (p, q + 1) in tgt:
                o2 = tgt[(p, q + 1)]
                blk = ql.kronecker(ql.qeye(c.dims[p]), d.d(q))
                if p % 2:
                    blk = -blk
                m[o2:o2 + blk.shape[0], off:off + w] += blk
        diffs.append(m)
    return TensorComplex(tuple(dims), tuple(diffs), tuple(blocks))


def tensor_chain_map(f: ChainMap, g: ChainMap, source: TensorComplex, target: TensorComplex) -> ChainMap:
    """f x g between tensor complexes built by :func:`tensor_complex`."""
    maps = []
    for n in range(len(source.dims)):
        m = ql.qzeros(target.dim(n), source.dims[n])
        tgt = {(p, q): o for p, q, o in target.blocks[n]} if n <= target.top else {}
        for p, q, off in source.blocks[n]:
            if (p, q) not in tgt:
                # the target block C'^p x D'^q is zero
                continue
            blk = ql.kronecker(f.maps[p], g.maps[q])
            o2 = tgt[(p, q)]
            m[o2:o2 + blk.shape[0], off:off + blk.shape[1]] = blk
        maps.append(m)
    return ChainMap(source, target, tuple(maps))


def betti_convolution(a, b) -> tuple:
    """(a * b)[n] = sum_{p+q=n} a[p] b[q]."""
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for p, x in enumerate(a):
        for q, y in enumerate(b):
            out[p + q] += x * y
    return tuple(out)
