"""Twisted Chevalley-Eilenberg complexes Lambda^k g* (x) E.

Coordinates: a k-cochain is indexed by (S, f) with S a sorted k-subset of
the basis indices, enumerated lexicographically, and f a fiber index; the
flat position is ``subset_position * fiber_dim + f``. The coordinate at
(S, f) is the f-th component of omega(e_S[0], ..., e_S[k-1]).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from . import qlinalg as ql
from .complexes import ChainMap, CohomologyResult, GenericComplex, complex_cohomology
from .errors import DegreeOverflow, DimensionMismatch, FlatnessViolated, NotGaugeEquivalent
from .liealg import (
    LieAlgebra,
    LieMorphism,
    Representation,
    check_representation,
    pullback_rep,
)


def subsets(n: int, k: int) -> list[tuple]:
    return list(combinations(range(n), k))


def subset_positions(n: int, k: int) -> dict:
    return {s: i for i, s in enumerate(combinations(range(n), k))}


def _zeros(rows, cols, exact):
    return ql.qzeros(rows, cols) if exact else np.zeros((rows, cols))


def ce_differentials(structure, rho, fiber: int, exact: bool = True) -> list:
    """Matrices d_0 .. d_{n-1} of

        (d w)(a_1..a_{k+1}) = sum_j (-1)^{j+1} rho(a_j) w(..^a_j..)
                            + sum_{j<l} (-1)^{j+l} w([a_j, a_l], ..^a_j..^a_l..)

    Works for exact (object/Fraction) or float inputs.
    """
    n = structure.shape[0]
    m = fiber
    eye = ql.qeye(m) if exact else np.eye(m)
    diffs = []
    pos = [subset_positions(n, k) for k in range(n + 1)]
    for k in range(n):
        d = _zeros(comb(n, k + 1) * m, comb(n, k) * m, exact)
        for T, ti in pos[k + 1].items():
            r0 = ti * m
            for j, a in enumerate(T):
                S = T[:j] + T[j + 1:]
                c0 = pos[k][S] * m
                blk = rho[a] if j % 2 == 0 else -rho[a]
                d[r0:r0 + m, c0:c0 + m] += blk
            for j in range(len(T)):
                for l in range(j + 1, len(T)):
                    a, b = T[j], T[l]
                    rest = T[:j] + T[j + 1:l] + T[l + 1:]
                    sign0 = -1 if (j + l) % 2 else 1
                    for mm in range(n):
                        coef = structure[a, b, mm]
                        if coef == 0 or mm in rest:
                            continue
                        below = sum(1 for x in rest if x < mm)
                        S = tuple(sorted(rest + (mm,)))
                        sign = sign0 * (-1 if below % 2 else 1)
                        c0 = pos[k][S] * m
                        d[r0:r0 + m, c0:c0 + m] += (sign * coef) * eye
        diffs.append(d)
    return diffs


@dataclass(frozen=True, eq=False)
class CEComplex(GenericComplex):
    algebra: LieAlgebra = None
    rep: Representation = None

    @property
    def n(self) -> int:
        return self.algebra.dim

    @property
    def fiber_dim(self) -> int:
        return self.rep.fiber_dim

    def index(self, subset, f: int = 0) -> int:
        subset = tuple(subset)
        return subset_positions(self.n, len(subset))[subset] * self.fiber_dim + f

    def basis_label(self, k: int, i: int) -> tuple:
        """Inverse of :meth:`index`: (subset, fiber index) of coordinate i in degree k."""
        s, f = divmod(i, self.fiber_dim)
        return subsets(self.n, k)[s], f

    def apply_d(self, k: int, v) -> np.ndarray:
        return self.d(k) @ np.asarray(v, dtype=object)


def build_ce_complex(g: LieAlgebra, r: Representation) -> CEComplex:
    if not r.algebra.same_as(g):
        raise DimensionMismatch("representation is defined on a different algebra")
    if len(r.rho) != g.dim:
        raise DimensionMismatch("representation has the wrong number of matrices")
    diffs = ce_differentials(g.structure, r.rho, r.fiber_dim)
    dims = tuple(comb(g.dim, k) * r.fiber_dim for k in range(g.dim + 1))
    c = CEComplex(dims, tuple(diffs), algebra=g, rep=r)
    bad = c.square_defects()
    if bad:
        raise FlatnessViolated(
            f"d^2 != 0 from degree {bad[0]}: the representation is not flat",
            report=check_representation(r),
        )
    return c


def cohomology(c: GenericComplex) -> CohomologyResult:
    return complex_cohomology(c)


def _minor_matrix(phi_matrix, n_src: int, n_tgt: int, k: int, exact: bool = True):
    """Lambda^k of the transpose: entry (S, T) = det phi[T, S]."""
    src = subsets(n_src, k)
    tgt = subsets(n_tgt, k)
    out = _zeros(len(src), len(tgt), exact)
    for i, S in enumerate(src):
        for j, T in enumerate(tgt):
            sub = phi_matrix[np.ix_(T, S)]
            out[i, j] = ql.det(sub) if exact else (np.linalg.det(sub) if k else 1.0)
    return out


def pullback_matrices(phi_matrix, n_src: int, n_tgt: int, fiber: int,
                      exact: bool = True, length: int | None = None) -> list:
    """(Phi* w)(a_1..a_k) = w(phi a_1, .., phi a_k) as matrices, degree by degree."""
    eye = ql.qeye(fiber) if exact else np.eye(fiber)
    mats = []
    for k in range(length if length is not None else n_src + 1):
        if k > n_tgt or k > n_src:
            mats.append(_zeros(comb(n_src, k) * fiber, comb(n_tgt, k) * fiber, exact))
            continue
        minors = _minor_matrix(phi_matrix, n_src, n_tgt, k, exact)
        mats.append(ql.kronecker(minors, eye) if exact else np.kron(minors, eye))
    return mats


def pullback_cochain_map(phi: LieMorphism, source_complex: CEComplex) -> ChainMap:
    """Chain map Omega(h, E) -> Omega(g, phi^! E) for phi: g -> h."""
    if not source_complex.algebra.same_as(phi.target):
        raise DimensionMismatch("complex must be built over the morphism target")
    target = build_ce_complex(phi.source, pullback_rep(phi, source_complex.rep))
    length = max(phi.source.dim, phi.target.dim) + 1
    mats = pullback_matrices(phi.matrix, phi.source.dim, phi.target.dim,
                             source_complex.fiber_dim, length=length)
    return ChainMap(source_complex, target, tuple(mats))


def wedge(n: int, omega, k: int, eta, l: int, fiber_dim: int = 1) -> np.ndarray:
    """Scalar k-cochain omega wedge E-valued l-cochain eta on an n-dimensional algebra."""
    omega = np.asarray(omega, dtype=object)
    eta = np.asarray(eta, dtype=object)
    if len(omega) != comb(n, k) or len(eta) != comb(n, l) * fiber_dim:
        raise DimensionMismatch("cochain length does not match its degree")
    if k + l > n:
        warnings.warn(f"wedge of degrees {k} and {l} exceeds dim {n}", DegreeOverflow)
        return ql.qzeros(0)
    m = fiber_dim
    out = ql.qzeros(comb(n, k + l) * m)
    pos = subset_positions(n, k + l)
    for si, S in enumerate(combinations(range(n), k)):
        a = omega[si]
        if a == 0:
            continue
        sset = set(S)
        for ti, T in enumerate(combinations(range(n), l)):
            if sset.intersection(T):
                continue
            inversions = sum(1 for s in S for t in T if s > t)
            sign = -1 if inversions % 2 else 1
            u = pos[tuple(sorted(S + T))] * m
            out[u:u + m] += (sign * a) * eta[ti * m:(ti + 1) * m]
    return out


@dataclass(frozen=True, eq=False)
class GaugeMap:
    """theta: E -> E' with rho(e_i) = theta^-1 rho'(e_i) theta."""

    source_rep: Representation
    target_rep: Representation
    theta: np.ndarray


def check_gauge(gm: GaugeMap) -> list[int]:
    """Basis indices i where theta rho(e_i) != rho'(e_i) theta."""
    th = gm.theta
    return [i for i, (a, b) in enumerate(zip(gm.source_rep.rho, gm.target_rep.rho))
            if not ql.is_zero(th @ a - b @ th)]


@dataclass(frozen=True, eq=False)
class GaugeTransport:
    chain_map: ChainMap
    induced: tuple
    source_cohomology: CohomologyResult
    target_cohomology: CohomologyResult

    @property
    def betti_equal(self) -> bool:
        return self.source_cohomology.betti == self.target_cohomology.betti

    def induced_invertible(self) -> bool:
        return all(m.shape[0] == m.shape[1] and ql.rank(m) == m.shape[0] for m in self.induced)


def gauge_transport(gm: GaugeMap, c: CEComplex) -> GaugeTransport:
    """Chain map [w] -> [theta o w], i.e. I (x) theta in every degree."""
    if not gm.source_rep.algebra.same_as(gm.target_rep.algebra):
        raise NotGaugeEquivalent("representations live on different algebras")
    if gm.theta.shape != (gm.target_rep.fiber_dim, gm.source_rep.fiber_dim) or \
            ql.rank(gm.theta) != gm.source_rep.fiber_dim or \
            gm.source_rep.fiber_dim != gm.target_rep.fiber_dim:
        raise NotGaugeEquivalent("theta is not an invertible fiber map")
    bad = check_gauge(gm)
    if bad:
        raise NotGaugeEquivalent(f"conjugation identity fails for basis vector {bad[0]}")
    if not c.rep.same_as(gm.source_rep):
        raise DimensionMismatch("complex is not built over the gauge map's source representation")
    target = build_ce_complex(c.algebra, gm.target_rep)
    n = c.algebra.dim
    maps = tuple(ql.kronecker(ql.qeye(comb(n, k)), gm.theta) for k in range(n + 1))
    f = ChainMap(c, target, maps)
    hs, ht = cohomology(c), cohomology(target)
    induced = tuple(f.induced(k, hs, ht) for k in range(n + 1))
    return GaugeTransport(f, induced, hs, ht)


def cup_class_is_well_defined(c_scalar: CEComplex, c: CEComplex, omega, k, eta, l, theta, xi) -> bool:
    """Whether (omega + d theta) ^ (eta + d xi) - omega ^ eta is exact, for closed omega, eta."""
    n = c.algebra.dim
    m = c.fiber_dim
    w1 = omega + (c_scalar.d(k - 1) @ theta if k > 0 else 0)
    e1 = eta + (c.d(l - 1) @ xi if l > 0 else 0)
    diff = wedge(n, w1, k, e1, l, m) - wedge(n, omega, k, eta, l, m)
    if k + l > n:
        return True
    if k + l == 0:
        return ql.is_zero(diff)
    return ql.in_span(ql.image_basis(c.d(k + l - 1)), diff)
