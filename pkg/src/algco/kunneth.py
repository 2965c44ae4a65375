"""Kunneth map Omega(g, E) (x) Omega(h, F) -> Omega(g + h, E (x) F).

On basis cochains the map sends e^S (x) v  (x)  e^T (x) w to
e^S ^ e^{T + n} (x) (v (x) w), where n = dim g. Since every index of S
precedes every index of T + n the wedge needs no reordering, so each
degree of the map is a permutation matrix.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import comb

import numpy as np

from . import qlinalg as ql
from .ce import CEComplex, build_ce_complex, subset_positions, subsets, wedge
from .complexes import (
    ChainMap,
    CohomologyResult,
    TensorComplex,
    betti_convolution,
    complex_cohomology,
    tensor_complex,
)
from .errors import DimensionMismatch
from .liealg import LieAlgebra, Representation, tensor_rep, trivial_rep


@dataclass(frozen=True, eq=False)
class ProductCohomology:
    factors: tuple
    convolution: tuple


def kunneth_betti(a: CohomologyResult, b: CohomologyResult) -> ProductCohomology:
    return ProductCohomology((a, b), betti_convolution(a.betti, b.betti))


@dataclass(frozen=True, eq=False)
class KunnethMap:
    """The map as a chain map from the tensor complex to the product CE complex."""

    left: CEComplex
    right: CEComplex
    chain_map: ChainMap

    @property
    def domain(self) -> TensorComplex:
        return self.chain_map.source

    @property
    def product(self) -> CEComplex:
        return self.chain_map.target

    def apply(self, omega, p: int, phi, q: int) -> np.ndarray:
        """Image of the elementary tensor omega (x) phi with deg omega = p, deg phi = q."""
        omega = np.asarray(omega, dtype=object)
        phi = np.asarray(phi, dtype=object)
        if len(omega) != self.left.dim(p) or len(phi) != self.right.dim(q):
            raise DimensionMismatch("factor cochains do not match their degrees")
        n = p + q
        x = ql.qzeros(self.domain.dims[n])
        for pp, qq, off in self.domain.blocks[n]:
            if pp == p:
                x[off:off + len(omega) * len(phi)] = ql.kronecker(
                    omega.reshape(-1, 1), phi.reshape(-1, 1)).reshape(-1)
        return self.chain_map.maps[n] @ x


def kunneth_chain_map(g: LieAlgebra, h: LieAlgebra, rE: Representation | None = None,
                      rF: Representation | None = None) -> KunnethMap:
    rE = rE if rE is not None else trivial_rep(g)
    rF = rF if rF is not None else trivial_rep(h)
    left, right = build_ce_complex(g, rE), build_ce_complex(h, rF)
    rP = tensor_rep(rE, rF)
    product = build_ce_complex(rP.algebra, rP)
    domain = tensor_complex(left, right)
    n, m = g.dim, h.dim
    mE, mF = rE.fiber_dim, rF.fiber_dim
    maps = []
    for deg in range(n + m + 1):
        pos = subset_positions(n + m, deg)
        mat = ql.qzeros(product.dims[deg], domain.dims[deg])
        for p, q, off in domain.blocks[deg]:
            width_right = comb(m, q) * mF
            for si, S in enumerate(subsets(n, p)):
                for ti, T in enumerate(subsets(m, q)):
                    u = pos[S + tuple(t + n for t in T)]
                    for e in range(mE):
                        for f in range(mF):
                            col = off + (si * mE + e) * width_right + ti * mF + f
                            mat[u * mE * mF + e * mF + f, col] = 1
        maps.append(mat)
    return KunnethMap(left, right, ChainMap(domain, product, tuple(maps)))


def koszul_spot_check(km: KunnethMap, rng: random.Random, trials: int = 10) -> list[str]:
    """K((w1 ^ w2) (x) (f1 ^ f2)) = (-1)^{deg f1 deg w2} K(w1 (x) f1) ^ K(w2 (x) f2).

    Scalar cochains only (the wedge of two fiber-valued cochains needs a
    pairing of fibers), so both factors must carry 1-dimensional reps.
    """
    n, m = km.left.n, km.right.n
    if km.left.fiber_dim != 1 or km.right.fiber_dim != 1:
        raise DimensionMismatch("ring compatibility is checked for 1-dimensional fibers")

    def rand_vec(length):
        return ql.qvector([rng.randint(-3, 3) for _ in range(length)])

    failures = []
    for _ in range(trials):
        k1, k2 = rng.randint(0, n), rng.randint(0, n)
        l1, l2 = rng.randint(0, m), rng.randint(0, m)
        if k1 + k2 > n or l1 + l2 > m:
            continue
        w1, w2 = rand_vec(comb(n, k1)), rand_vec(comb(n, k2))
        f1, f2 = rand_vec(comb(m, l1)), rand_vec(comb(m, l2))
        lhs = km.apply(wedge(n, w1, k1, w2, k2), k1 + k2, wedge(m, f1, l1, f2, l2), l1 + l2)
        a = km.apply(w1, k1, f1, l1)
        b = km.apply(w2, k2, f2, l2)
        rhs = wedge(n + m, a, k1 + l1, b, k2 + l2)
        if (l1 * k2) % 2:
            rhs = -rhs
        if not ql.is_zero(lhs - rhs):
            failures.append(f"degrees ({k1},{l1}) x ({k2},{l2})")
    return failures


def kunneth_crosscheck(g: LieAlgebra, h: LieAlgebra, rE: Representation | None = None,
                       rF: Representation | None = None) -> dict:
    """Betti numbers of g + h with E (x) F computed directly and by convolution."""
    km = kunneth_chain_map(g, h, rE, rF)
    hl, hr = complex_cohomology(km.left), complex_cohomology(km.right)
    hp = complex_cohomology(km.product)
    conv = kunneth_betti(hl, hr).convolution
    maps = km.chain_map.maps
    full_rank = all(m.shape[0] == m.shape[1] and ql.rank(m) == m.shape[0] for m in maps)
    chain_ok = km.chain_map.is_chain_map()
    closed_ok, spans = True, True
    for deg in range(len(hp.betti)):
        images = []
        for p in range(len(hl.betti)):
            q = deg - p
            if not 0 <= q < len(hr.betti):
                continue
            for w in hl.representatives[p].vectors:
                for f in hr.representatives[q].vectors:
                    x = km.apply(w, p, f, q)
                    if not ql.is_zero(km.product.d(deg) @ x):
                        closed_ok = False
                    images.append(hp.class_of(deg, x))
        got = ql.rank(ql.qmatrix(images).T) if images else 0
        if got != hp.betti[deg]:
            spans = False
    return {
        "direct": list(hp.betti),
        "convolution": list(conv),
        "match": tuple(hp.betti) == tuple(conv),
        "full_rank": full_rank,
        "chain_map": chain_ok,
        "closed_to_closed": closed_ok,
        "classes_span": spans,
    }
