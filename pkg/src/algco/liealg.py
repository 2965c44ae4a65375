"""Finite-dimensional Lie algebras over Q, morphisms and representations.

A representation of a Lie algebra is the same thing as a flat connection
over a point, so flatness is checked as the homomorphism property
rho([x, y]) = [rho(x), rho(y)].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import NamedTuple

import numpy as np

from . import qlinalg as ql
from .errors import DimensionMismatch, InvalidMorphism, InvalidRepresentation


class Violation(NamedTuple):
    kind: str
    indices: tuple
    residual: object


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Structure constants c[i, j, k] with [e_i, e_j] = sum_k c[i, j, k] e_k."""

    structure: np.ndarray
    name: str = "g"

    @property
    def dim(self) -> int:
        return self.structure.shape[0]

    def bracket(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=object)
        y = np.asarray(y, dtype=object)
        return np.einsum("i,j,ijk->k", x, y, self.structure)

    def ad(self, x) -> np.ndarray:
        """Matrix of ad_x in the standard basis (column j is [x, e_j])."""
        x = np.asarray(x, dtype=object)
        return np.einsum("i,ijk->kj", x, self.structure)

    def ad_basis(self) -> list[np.ndarray]:
        return [self.structure[i].T.copy() for i in range(self.dim)]

    def basis_vector(self, i: int) -> np.ndarray:
        v = ql.qzeros(self.dim)
        v[i] = Fraction(1)
        return v

    def is_abelian(self) -> bool:
        return ql.is_zero(self.structure)

    def same_as(self, other: "LieAlgebra") -> bool:
        return self is other or (
            self.structure.shape == other.structure.shape
            and bool(np.all(self.structure == other.structure))
        )

    def float_structure(self) -> np.ndarray:
        return np.asarray(self.structure, dtype=float)


def lie_algebra(dim: int, brackets: dict, name: str = "g") -> LieAlgebra:
    """Build from ``{(i, j): {k: coeff}}`` for i < j; antisymmetry is filled in."""
    c = np.empty((dim, dim, dim), dtype=object)
    c.fill(Fraction(0))
    for (i, j), coeffs in brackets.items():
        if isinstance(coeffs, dict):
            items = coeffs.items()
        else:
            items = enumerate(coeffs)
        for k, v in items:
            v = ql.to_q(v)
            c[i, j, k] = v
            c[j, i, k] = -v
    return LieAlgebra(c, name)


def abelian(n: int) -> LieAlgebra:
    return lie_algebra(n, {}, name=f"abelian{n}")


def heisenberg3() -> LieAlgebra:
    # basis (x, y, z): [x, y] = z
    return lie_algebra(3, {(0, 1): {2: 1}}, name="heisenberg3")


def sl2() -> LieAlgebra:
    # basis (h, e, f)
    return lie_algebra(3, {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}}, name="sl2")


def so3() -> LieAlgebra:
    # [e1, e2] = e3 and cyclic
    return lie_algebra(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (0, 2): {1: -1}}, name="so3")


BUILTIN_ALGEBRAS = {
    "abelian1": lambda: abelian(1),
    "abelian2": lambda: abelian(2),
    "abelian3": lambda: abelian(3),
    "abelian4": lambda: abelian(4),
    "abelian5": lambda: abelian(5),
    "heisenberg3": heisenberg3,
    "sl2": sl2,
    "so3": so3,
}


def check_lie_algebra(g: LieAlgebra) -> list[Violation]:
    """Every failed antisymmetry or Jacobi instance; empty iff ``g`` is a Lie algebra."""
    c = g.structure
    n = g.dim
    report = []
    for i in range(n):
        for j in range(i, n):
            for k in range(n):
                s = c[i, j, k] + c[j, i, k]
                if s != 0:
                    report.append(Violation("antisymmetry", (i, j, k), s))
    # cc[i, j, l, k] = sum_m c[i, j, m] c[m, l, k]
    cc = np.einsum("ijm,mlk->ijlk", c, c)
    for i, j, l in combinations(range(n), 3):
        for k in range(n):
            s = cc[i, j, l, k] + cc[j, l, i, k] + cc[l, i, j, k]
            if s != 0:
                report.append(Violation("jacobi", (i, j, l, k), s))
    return report


@dataclass(frozen=True, eq=False)
class LieMorphism:
    """Linear map source -> target, stored as a target.dim x source.dim matrix."""

    source: LieAlgebra
    target: LieAlgebra
    matrix: np.ndarray

    def __post_init__(self):
        if self.matrix.shape != (self.target.dim, self.source.dim):
            raise DimensionMismatch(
                f"morphism matrix has shape {self.matrix.shape}, "
                f"expected {(self.target.dim, self.source.dim)}"
            )

    def __call__(self, x):
        return self.matrix @ np.asarray(x, dtype=object)

    def compose(self, inner: "LieMorphism") -> "LieMorphism":
        """self o inner."""
        return LieMorphism(inner.source, self.target, self.matrix @ inner.matrix)


def check_morphism(phi: LieMorphism) -> list[Violation]:
    report = []
    g, h, m = phi.source, phi.target, phi.matrix
    for i, j in combinations(range(g.dim), 2):
        lhs = h.bracket(m[:, i], m[:, j])
        rhs = m @ g.structure[i, j]
        diff = lhs - rhs
        if not ql.is_zero(diff):
            report.append(Violation("bracket", (i, j), diff))
    return report


def morphism(source: LieAlgebra, target: LieAlgebra, matrix, check: bool = True) -> LieMorphism:
    phi = LieMorphism(source, target, ql.qmatrix(matrix) if not isinstance(matrix, np.ndarray) else matrix)
    if check:
        bad = check_morphism(phi)
        if bad:
            raise InvalidMorphism(f"not a Lie algebra morphism: {bad[0]}")
    return phi


def identity_morphism(g: LieAlgebra) -> LieMorphism:
    return LieMorphism(g, g, ql.qeye(g.dim))


def zero_morphism(g: LieAlgebra, h: LieAlgebra) -> LieMorphism:
    return LieMorphism(g, h, ql.qzeros(h.dim, g.dim))


@dataclass(frozen=True, eq=False)
class Representation:
    """rho[i] is the fiber_dim x fiber_dim matrix of the basis vector e_i."""

    algebra: LieAlgebra
    fiber_dim: int
    rho: tuple = field(default=())

    def action(self, x) -> np.ndarray:
        out = ql.qzeros(self.fiber_dim, self.fiber_dim)
        for xi, r in zip(np.asarray(x, dtype=object), self.rho):
            if xi != 0:
                out = out + xi * r
        return out

    def same_as(self, other: "Representation") -> bool:
        return (
            self.fiber_dim == other.fiber_dim
            and self.algebra.same_as(other.algebra)
            and all(bool(np.all(a == b)) for a, b in zip(self.rho, other.rho))
        )


def check_representation(r: Representation) -> list[Violation]:
    """Curvature residuals rho([e_i, e_j]) - [rho(e_i), rho(e_j)]; empty iff flat."""
    g = r.algebra
    if len(r.rho) != g.dim:
        raise DimensionMismatch(f"expected {g.dim} matrices, got {len(r.rho)}")
    for m in r.rho:
        if m.shape != (r.fiber_dim, r.fiber_dim):
            raise DimensionMismatch(f"rho matrix of shape {m.shape}, fiber_dim is {r.fiber_dim}")
    report = []
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            curv = r.action(g.structure[i, j]) - (r.rho[i] @ r.rho[j] - r.rho[j] @ r.rho[i])
            if not ql.is_zero(curv):
                report.append(Violation("curvature", (i, j), curv))
    return report


def representation(g: LieAlgebra, matrices, check: bool = True) -> Representation:
    mats = tuple(m if isinstance(m, np.ndarray) else ql.qmatrix(m) for m in matrices)
    fiber = mats[0].shape[0] if mats else 1
    r = Representation(g, fiber, mats)
    if check:
        bad = check_representation(r)
        if bad:
            raise InvalidRepresentation(f"representation is not flat: {bad[0]}")
    return r


def trivial_rep(g: LieAlgebra, fiber_dim: int = 1) -> Representation:
    return Representation(g, fiber_dim, tuple(ql.qzeros(fiber_dim, fiber_dim) for _ in range(g.dim)))


def adjoint_rep(g: LieAlgebra) -> Representation:
    return Representation(g, g.dim, tuple(g.ad_basis()))


def weight_rep(g: LieAlgebra, weights) -> Representation:
    """Diagonal representation of an abelian algebra; ``weights[i]`` is the diagonal of rho(e_i)."""
    if not g.is_abelian():
        raise InvalidRepresentation("weight representations are only flat on abelian algebras")
    mats = []
    for w in weights:
        m = ql.qzeros(len(w), len(w))
        for k, x in enumerate(w):
            m[k, k] = ql.to_q(x)
        mats.append(m)
    return representation(g, mats)


def sl2_fundamental() -> Representation:
    g = sl2()
    h = ql.qmatrix([[1, 0], [0, -1]])
    e = ql.qmatrix([[0, 1], [0, 0]])
    f = ql.qmatrix([[0, 0], [1, 0]])
    return representation(g, [h, e, f])


def direct_product(g: LieAlgebra, h: LieAlgebra) -> LieAlgebra:
    n, m = g.dim, h.dim
    c = np.empty((n + m,) * 3, dtype=object)
    c.fill(Fraction(0))
    c[:n, :n, :n] = g.structure
    c[n:, n:, n:] = h.structure
    return LieAlgebra(c, f"{g.name}x{h.name}")


def semidirect(g: LieAlgebra, r: Representation) -> LieAlgebra:
    """Bracket [(a1, e1), (a2, e2)] = ([a1, a2], rho(a1) e2 - rho(a2) e1) on g + V."""
    bad = check_representation(r)
    if bad:
        raise InvalidRepresentation(f"cannot form semidirect sum: {bad[0]}")
    return _semidirect_unchecked(g, r)


def _semidirect_unchecked(g: LieAlgebra, r: Representation) -> LieAlgebra:
    n, m = g.dim, r.fiber_dim
    c = np.empty((n + m,) * 3, dtype=object)
    c.fill(Fraction(0))
    c[:n, :n, :n] = g.structure
    for i in range(n):
        for b in range(m):
            # [e_i, v_b] = rho(e_i) v_b
            c[i, n + b, n:] = r.rho[i][:, b]
            c[n + b, i, n:] = -r.rho[i][:, b]
    return LieAlgebra(c, f"{g.name}|x|V{m}")


def pullback_rep(phi: LieMorphism, r: Representation) -> Representation:
    """rho'(e_i) = rho(phi(e_i))."""
    if not phi.target.same_as(r.algebra):
        raise DimensionMismatch("representation lives on a different algebra than the morphism target")
    mats = tuple(r.action(phi.matrix[:, i]) for i in range(phi.source.dim))
    return Representation(phi.source, r.fiber_dim, mats)


def tensor_rep(rE: Representation, rF: Representation, diagonal: bool = False) -> Representation:
    """Tensor product representation.

    By default the result lives on the direct product of the two algebras,
    rho(a, b) = rho_E(a) x I + I x rho_F(b). With ``diagonal=True`` both
    representations must share one algebra and rho(x) = rho_E(x) x I + I x rho_F(x).
    """
    IE = ql.qeye(rE.fiber_dim)
    IF = ql.qeye(rF.fiber_dim)
    if diagonal:
        if not rE.algebra.same_as(rF.algebra):
            raise DimensionMismatch("diagonal tensor product needs a common algebra")
        mats = tuple(
            ql.kronecker(a, IF) + ql.kronecker(IE, b) for a, b in zip(rE.rho, rF.rho)
        )
        return Representation(rE.algebra, rE.fiber_dim * rF.fiber_dim, mats)
    g = direct_product(rE.algebra, rF.algebra)
    mats = tuple(ql.kronecker(a, IF) for a in rE.rho) + tuple(ql.kronecker(IE, b) for b in rF.rho)
    return Representation(g, rE.fiber_dim * rF.fiber_dim, mats)


def conjugate_rep(r: Representation, p) -> Representation:
    """rho'(x) = P rho(x) P^-1."""
    p_inv = ql.inverse(p)
    return Representation(r.algebra, r.fiber_dim, tuple(p @ m @ p_inv for m in r.rho))
