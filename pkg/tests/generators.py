"""Random rational test data: Lie algebra morphisms, invertible matrices, reps."""

import random
from fractions import Fraction

import numpy as np

from algco import qlinalg as ql
from algco import liealg as la


def rq(rng: random.Random, lo=-3, hi=3, dens=(1, 2)):
    return Fraction(rng.randint(lo, hi), rng.choice(dens))


def random_invertible(rng: random.Random, n: int) -> np.ndarray:
    """Product of a unit lower and a unit upper triangular matrix with a random diagonal."""
    low = ql.qeye(n)
    up = ql.qeye(n)
    for i in range(n):
        for j in range(n):
            if i > j:
                low[i, j] = rq(rng)
            elif i < j:
                up[i, j] = rq(rng)
    diag = ql.qeye(n)
    for i in range(n):
        diag[i, i] = Fraction(rng.choice([-2, -1, 1, 2, 3]))
    return low @ diag @ up


def _rotation(rng: random.Random) -> np.ndarray:
    """Rational rotation via the Cayley transform of a skew matrix."""
    a, b, c = (rq(rng) for _ in range(3))
    s = ql.qmatrix([[0, -c, b], [c, 0, -a], [-b, a, 0]])
    i = ql.qeye(3)
    return (i - s) @ ql.inverse(i + s)


def _sl2_automorphism(rng: random.Random) -> np.ndarray:
    g = la.sl2()
    out = ql.qeye(3)
    for idx in (1, 2, 1):
        x = g.basis_vector(idx) * rq(rng)
        ad = g.ad(x)
        # ad of e or f is nilpotent of order 3
        out = (ql.qeye(3) + ad + ad @ ad / 2) @ out
    return out


def _heis_endomorphism(rng: random.Random) -> np.ndarray:
    a, b, c, d, e, f = (rq(rng) for _ in range(6))
    m = ql.qmatrix([[a, c, 0], [b, d, 0], [e, f, a * d - b * c]])
    return m


def _rank_one(rng: random.Random, g: la.LieAlgebra, h: la.LieAlgebra, killed) -> np.ndarray:
    """e_i -> a_i x for a fixed x; a_i = 0 on indices that must die."""
    x = ql.qvector([rq(rng) for _ in range(h.dim)])
    m = ql.qzeros(h.dim, g.dim)
    for i in range(g.dim):
        if i not in killed:
            m[:, i] = rq(rng) * x
    return m


def _killed(g: la.LieAlgebra) -> set:
    # basis vectors that lie in [g, g] and so must map into the abelian image trivially
    if g.name in ("sl2", "so3"):
        return set(range(g.dim))
    if g.name == "heisenberg3":
        return {2}
    return set()


SHIPPED = ["abelian1", "abelian2", "abelian3", "heisenberg3", "sl2", "so3"]


def morphism_matrix(rng: random.Random, src: la.LieAlgebra, tgt: la.LieAlgebra) -> np.ndarray:
    same = src.name == tgt.name and rng.random() < 0.8
    if same and src.name == "so3":
        return _rotation(rng)
    if same and src.name == "sl2":
        return _sl2_automorphism(rng)
    if same and src.name == "heisenberg3":
        return _heis_endomorphism(rng)
    return _rank_one(rng, src, tgt, _killed(src))


def random_morphism(rng: random.Random, src=None, tgt=None) -> la.LieMorphism:
    src = src or la.BUILTIN_ALGEBRAS[rng.choice(SHIPPED)]()
    tgt = tgt or la.BUILTIN_ALGEBRAS[rng.choice(SHIPPED)]()
    return la.morphism(src, tgt, morphism_matrix(rng, src, tgt))


def shipped_reps(g: la.LieAlgebra) -> list:
    out = [la.trivial_rep(g), la.adjoint_rep(g)]
    if g.name == "sl2":
        out.append(la.sl2_fundamental())
    if g.is_abelian():
        out.append(la.weight_rep(g, [[1, -1]] + [[0, 2]] * (g.dim - 1)))
    return out
