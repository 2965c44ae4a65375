"""Short exact sequences of finite complexes, their long exact sequences,
simplicial cochains and Cech-CE double complexes over a cover nerve.

The connecting map is computed by the snake lemma: lift a cocycle of E
through p, apply the differential of D, pull the result back through i.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import qlinalg as ql
from .ce import CEComplex, build_ce_complex
from .complexes import (
    ChainMap,
    CohomologyResult,
    GenericComplex,
    TensorComplex,
    betti_convolution,
    complex_cohomology,
    generic_complex,
    tensor_chain_map,
    tensor_complex,
)
from .errors import DimensionMismatch, LiftFailure, NotExact
from .liealg import LieAlgebra, Representation, trivial_rep

__all__ = [
    "GenericComplex", "CohomologyResult", "ChainMap", "complex_cohomology",
    "SimplicialComplex", "simplicial_cochain_complex", "restriction_map",
    "ShortExactSeq", "short_exact_sequence", "connecting_map", "les_exactness_check",
    "DoubleComplex", "cech_ce_double", "mv_two_set", "direct_sum",
    "point", "circle", "sphere", "circle_two_arcs",
]


# -- simplicial complexes ------------------------------------------------------

@dataclass(frozen=True)
class SimplicialComplex:
    """Closure of a list of maximal simplices; orientation from increasing vertex order."""

    vertices: int
    maximal_simplices: tuple

    def __post_init__(self):
        simp = []
        for s in self.maximal_simplices:
            s = tuple(int(v) for v in s)
            if not s:
                raise ValueError("empty simplex")
            if list(s) != sorted(set(s)):
                raise ValueError(f"simplex {s} must list distinct vertices in increasing order")
            if s[-1] >= self.vertices or s[0] < 0:
                raise ValueError(f"simplex {s} uses a vertex outside 0..{self.vertices - 1}")
            simp.append(s)
        if len(set(simp)) != len(simp):
            raise ValueError("duplicate maximal simplices")
        object.__setattr__(self, "maximal_simplices", tuple(simp))

    @cached_property
    def faces(self) -> tuple:
        """faces[p] is the sorted tuple of p-simplices."""
        top = max((len(s) for s in self.maximal_simplices), default=0) - 1
        out = [set() for _ in range(top + 1)]
        for s in self.maximal_simplices:
            for p in range(len(s)):
                out[p].update(combinations(s, p + 1))
        return tuple(tuple(sorted(f)) for f in out)

    @property
    def dimension(self) -> int:
        return len(self.faces) - 1

    def simplex_set(self) -> set:
        return {s for fs in self.faces for s in fs}

    def contains(self, other: "SimplicialComplex") -> bool:
        return other.simplex_set() <= self.simplex_set()

    def intersection(self, other: "SimplicialComplex") -> "SimplicialComplex":
        common = self.simplex_set() & other.simplex_set()
        return _from_simplex_set(max(self.vertices, other.vertices), common)

    def union(self, other: "SimplicialComplex") -> "SimplicialComplex":
        return _from_simplex_set(max(self.vertices, other.vertices),
                                 self.simplex_set() | other.simplex_set())


def _from_simplex_set(n: int, simplices: set) -> SimplicialComplex:
    maximal = [s for s in simplices
               if not any(len(t) > len(s) and set(s) <= set(t) for t in simplices)]
    return SimplicialComplex(n, tuple(sorted(maximal)))


def point() -> SimplicialComplex:
    return SimplicialComplex(1, ((0,),))


def circle(n: int = 3) -> SimplicialComplex:
    edges = [tuple(sorted((i, (i + 1) % n))) for i in range(n)]
    return SimplicialComplex(n, tuple(sorted(edges)))


def sphere() -> SimplicialComplex:
    """Boundary of the tetrahedron."""
    return SimplicialComplex(4, tuple(combinations(range(4), 3)))


def circle_two_arcs():
    """Square circle 0-1-2-3-0 with arcs U = 0-1-2, V = 2-3-0; U n V = {0, 2}."""
    k = circle(4)
    u = SimplicialComplex(4, ((0, 1), (1, 2)))
    v = SimplicialComplex(4, ((0, 3), (2, 3)))
    return k, u, v, u.intersection(v)


def simplicial_cochain_complex(k: SimplicialComplex) -> GenericComplex:
    """(delta f)(v_0..v_{p+1}) = sum_i (-1)^i f(v_0..^v_i..v_{p+1})."""
    faces = k.faces
    pos = [{s: i for i, s in enumerate(fs)} for fs in faces]
    diffs = []
    for p in range(len(faces) - 1):
        m = ql.qzeros(len(faces[p + 1]), len(faces[p]))
        for r, s in enumerate(faces[p + 1]):
            for i in range(len(s)):
                m[r, pos[p][s[:i] + s[i + 1:]]] += Fraction(-1 if i % 2 else 1)
        diffs.append(m)
    return GenericComplex(tuple(len(fs) for fs in faces), tuple(diffs))


def restriction_map(big: SimplicialComplex, small: SimplicialComplex,
                    source: GenericComplex | None = None,
                    target: GenericComplex | None = None) -> ChainMap:
    """Restriction of cochains C(big) -> C(small) for a subcomplex ``small``.

    ``source``/``target`` may pass already built cochain complexes so that
    several maps share the same endpoint objects.
    """
    if not big.contains(small):
        raise DimensionMismatch("not a subcomplex")
    cb = source if source is not None else simplicial_cochain_complex(big)
    cs = target if target is not None else simplicial_cochain_complex(small)
    maps = []
    for p in range(len(cb.dims)):
        m = ql.qzeros(cs.dim(p), cb.dims[p])
        if p < len(small.faces):
            pos = {s: i for i, s in enumerate(big.faces[p])}
            for r, s in enumerate(small.faces[p]):
                m[r, pos[s]] = Fraction(1)
        maps.append(m)
    return ChainMap(cb, cs, tuple(maps))


# -- direct sums and identity maps --------------------------------------------

def _pad(c: GenericComplex, length: int) -> GenericComplex:
    if len(c.dims) >= length:
        return c
    dims = tuple(c.dims) + (0,) * (length - len(c.dims))
    diffs = tuple(c.d(k) for k in range(length - 1))
    return GenericComplex(dims, diffs)


def direct_sum(a: GenericComplex, b: GenericComplex) -> GenericComplex:
    length = max(len(a.dims), len(b.dims))
    a, b = _pad(a, length), _pad(b, length)
    dims = tuple(x + y for x, y in zip(a.dims, b.dims))
    diffs = []
    for k in range(length - 1):
        m = ql.qzeros(dims[k + 1], dims[k])
        m[:a.dims[k + 1], :a.dims[k]] = a.diff[k]
        m[a.dims[k + 1]:, a.dims[k]:] = b.diff[k]
        diffs.append(m)
    return GenericComplex(dims, tuple(diffs))


def identity_map(c: GenericComplex) -> ChainMap:
    return ChainMap(c, c, tuple(ql.qeye(n) for n in c.dims))


# -- short exact sequences -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class ShortExactSeq:
    """0 -> C --i--> D --p--> E -> 0."""

    i: ChainMap
    p: ChainMap

    @property
    def C(self) -> GenericComplex:
        return self.i.source

    @property
    def D(self) -> GenericComplex:
        return self.i.target

    @property
    def E(self) -> GenericComplex:
        return self.p.target

    @property
    def length(self) -> int:
        return max(len(self.C.dims), len(self.D.dims), len(self.E.dims))

    def exactness_failures(self) -> list[tuple[int, str]]:
        bad = []
        if self.p.source is not self.i.target:
            bad.append((-1, "middle complexes differ"))
        for name, f in (("i", self.i), ("p", self.p)):
            for k in f.commutation_defects():
                bad.append((k, f"{name} does not commute with d"))
        for k in range(self.length):
            ik, pk = self._map(self.i, k), self._map(self.p, k)
            ri, rp = ql.rank(ik), ql.rank(pk)
            if ri != self.C.dim(k):
                bad.append((k, "i not injective"))
            if rp != self.E.dim(k):
                bad.append((k, "p not surjective"))
            if not ql.product_is_zero(pk, ik):
                bad.append((k, "p o i != 0"))
            elif ri + rp != self.D.dim(k):
                bad.append((k, "ker p != im i"))
        return bad

    @staticmethod
    def _map(f: ChainMap, k: int) -> np.ndarray:
        if k < len(f.maps):
            return f.maps[k]
        return ql.qzeros(f.target.dim(k), f.source.dim(k))

    @cached_property
    def cohomologies(self) -> tuple[CohomologyResult, CohomologyResult, CohomologyResult]:
        L = self.length
        return tuple(complex_cohomology(_pad(c, L)) for c in (self.C, self.D, self.E))


def short_exact_sequence(i: ChainMap, p: ChainMap) -> ShortExactSeq:
    s = ShortExactSeq(i, p)
    bad = s.exactness_failures()
    if bad:
        k, why = bad[0]
        raise NotExact(f"degree {k}: {why}", degree=k)
    return s


def connecting_map(s: ShortExactSeq, q: int, rng: random.Random | None = None) -> np.ndarray:
    """Matrix of H^q(E) -> H^{q+1}(C) in the representative bases.

    With ``rng`` the lift through p is shifted by a random element of ker p,
    which must not change the result.
    """
    hc, hd, he = s.cohomologies
    nq = len(hc.betti)
    out_rows = hc.betti[q + 1] if q + 1 < nq else 0
    out = ql.qzeros(out_rows, he.betti[q])
    if out_rows == 0 or he.betti[q] == 0:
        return out
    pq = s._map(s.p, q)
    iq1 = s._map(s.i, q + 1)
    ker_p = ql.kernel_basis(pq) if rng is not None else None
    for j, z in enumerate(he.representatives[q].vectors):
        y = ql.solve(pq, z)
        if y is None:
            raise LiftFailure(f"cannot lift a degree-{q} cocycle through p")
        if rng is not None:
            for v in ker_p.vectors:
                y = y + Fraction(rng.randint(-7, 7), rng.randint(1, 4)) * v
        w = s.D.d(q) @ y
        x = ql.solve(iq1, w)
        if x is None:
            raise LiftFailure("d(lift) is not in the image of i")
        out[:, j] = hc.class_of(q + 1, x)
    return out


def les_exactness_check(s: ShortExactSeq) -> dict:
    """Exactness of ... H^q(C) -> H^q(D) -> H^q(E) -> H^{q+1}(C) ... by rank counting."""
    hc, hd, he = s.cohomologies
    L = s.length
    nodes, maps = [], []
    for q in range(L):
        nodes += [("C", q, hc.betti[q]), ("D", q, hd.betti[q]), ("E", q, he.betti[q])]
        maps += [
            _induced(s._map(s.i, q), hc, hd, q),
            _induced(s._map(s.p, q), hd, he, q),
            connecting_map(s, q) if q + 1 < L else ql.qzeros(0, he.betti[q]),
        ]
    failures = []
    for idx, (name, q, dim) in enumerate(nodes):
        incoming = maps[idx - 1] if idx > 0 else ql.qzeros(dim, 0)
        outgoing = maps[idx]
        if outgoing.shape[0] and incoming.shape[1] and not ql.product_is_zero(outgoing, incoming):
            failures.append(f"H^{q}({name}): composite is nonzero")
            continue
        if ql.rank(incoming) + ql.rank(outgoing) != dim:
            failures.append(f"H^{q}({name}): rank(in) + rank(out) != {dim}")
    chi = tuple(c.euler_characteristic() for c in (s.C, s.D, s.E))
    return {
        "exact": not failures,
        "failures": failures,
        "betti": {"C": list(hc.betti), "D": list(hd.betti), "E": list(he.betti)},
        "connecting_ranks": [ql.rank(maps[3 * q + 2]) for q in range(L)],
        "euler": {"C": chi[0], "D": chi[1], "E": chi[2]},
        "euler_additive": chi[1] == chi[0] + chi[2],
    }


def _induced(m: np.ndarray, hs: CohomologyResult, ht: CohomologyResult, k: int) -> np.ndarray:
    out = ql.qzeros(ht.betti[k], hs.betti[k])
    for j, v in enumerate(hs.representatives[k].vectors):
        out[:, j] = ht.class_of(k, m @ v)
    return out


def _kernel_subcomplex(p: ChainMap, d: GenericComplex) -> tuple[GenericComplex, ChainMap]:
    """The subcomplex ker p of d with its inclusion."""
    bases = [ql.kernel_basis(p.maps[k]).as_columns() for k in range(len(d.dims))]
    dims = tuple(b.shape[1] for b in bases)
    diffs = []
    for k in range(len(d.dims) - 1):
        m = ql.qzeros(dims[k + 1], dims[k])
        image = ql.matmul(d.diff[k], bases[k])
        for j in range(dims[k]):
            x = ql.solve(bases[k + 1], image[:, j]) if dims[k + 1] else ql.qzeros(0)
            if x is None:
                raise NotExact("kernel of p is not a subcomplex", degree=k)
            m[:, j] = x
        diffs.append(m)
    c = GenericComplex(dims, tuple(diffs))
    return c, ChainMap(c, d, tuple(bases))


def mv_two_set(cover_u: GenericComplex, cover_v: GenericComplex, intersection: GenericComplex,
               restrict_u: ChainMap, restrict_v: ChainMap) -> ShortExactSeq:
    """0 -> glued -> C(U) + C(V) --(r_V - r_U)--> C(U n V) -> 0.

    The glued term is the kernel of the difference of restrictions.
    """
    for name, r, src in (("U", restrict_u, cover_u), ("V", restrict_v, cover_v)):
        if r.source is not src or r.target is not intersection:
            raise DimensionMismatch(f"restriction from {name} has the wrong endpoints")
        bad = r.commutation_defects()
        if bad:
            raise NotExact(f"restriction from {name} is not a chain map", degree=bad[0])
    L = max(len(cover_u.dims), len(cover_v.dims), len(intersection.dims))
    u, v, w = _pad(cover_u, L), _pad(cover_v, L), _pad(intersection, L)
    d = direct_sum(u, v)
    maps = []
    for k in range(L):
        m = ql.qzeros(w.dims[k], d.dims[k])
        m[:, :u.dims[k]] = -ShortExactSeq._map(restrict_u, k)
        m[:, u.dims[k]:] = ShortExactSeq._map(restrict_v, k)
        if ql.rank(m) != w.dims[k]:
            raise NotExact(f"difference of restrictions is not onto in degree {k}", degree=k)
        maps.append(m)
    p = ChainMap(d, w, tuple(maps))
    glued, incl = _kernel_subcomplex(p, d)
    return short_exact_sequence(incl, p)


# -- Cech-CE double complex ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class DoubleComplex:
    """C^{p,q} = C^p(nerve) (x) Omega^q(g, F) with constant coefficients."""

    nerve: GenericComplex
    ce: CEComplex

    def space_dim(self, p: int, q: int) -> int:
        return self.nerve.dim(p) * self.ce.dim(q)

    def horizontal(self, p: int, q: int) -> np.ndarray:
        """Cech differential C^{p,q} -> C^{p+1,q}."""
        return ql.kronecker(self.nerve.d(p), ql.qeye(self.ce.dim(q)))

    def vertical(self, p: int, q: int) -> np.ndarray:
        """(-1)^p d_nabla: C^{p,q} -> C^{p,q+1}."""
        m = ql.kronecker(ql.qeye(self.nerve.dim(p)), self.ce.d(q))
        return -m if p % 2 else m

    def identity_failures(self) -> list[str]:
        bad = []
        for p in range(len(self.nerve.dims)):
            for q in range(len(self.ce.dims)):
                if not ql.product_is_zero(self.horizontal(p + 1, q), self.horizontal(p, q)):
                    bad.append(f"delta^2 at ({p},{q})")
                if not ql.product_is_zero(self.vertical(p, q + 1), self.vertical(p, q)):
                    bad.append(f"d^2 at ({p},{q})")
                anti = ql.matmul(self.vertical(p + 1, q), self.horizontal(p, q)) + \
                    ql.matmul(self.horizontal(p, q + 1), self.vertical(p, q))
                if not ql.is_zero(anti):
                    bad.append(f"delta d + d delta at ({p},{q})")
        return bad

    @cached_property
    def total(self) -> TensorComplex:
        return tensor_complex(self.nerve, self.ce)

    @cached_property
    def total_cohomology(self) -> CohomologyResult:
        return complex_cohomology(self.total)

    @property
    def total_betti(self) -> tuple:
        return self.total_cohomology.betti


def cech_ce_double(nerve: SimplicialComplex, g: LieAlgebra, r: Representation | None = None) -> DoubleComplex:
    r = r if r is not None else trivial_rep(g)
    return DoubleComplex(simplicial_cochain_complex(nerve), build_ce_complex(g, r))


def mv_circle_with_ce(ce: GenericComplex | None = None) -> tuple[ShortExactSeq, GenericComplex]:
    """MV sequence of the two-arc circle, optionally tensored with a CE complex.

    Returns the sequence and the cochain complex of the whole circle (tensored
    the same way) for comparison with the glued term.
    """
    k, u, v, w = circle_two_arcs()
    cw = simplicial_cochain_complex(w)
    ru, rv = restriction_map(u, w, target=cw), restriction_map(v, w, target=cw)
    whole = simplicial_cochain_complex(k)
    if ce is None:
        return mv_two_set(ru.source, rv.source, ru.target, ru, rv), whole
    idc = identity_map(ce)
    tu, tv, tw = (tensor_complex(x, ce) for x in (ru.source, rv.source, ru.target))
    su = tensor_chain_map(ru, idc, tu, tw)
    sv = tensor_chain_map(rv, idc, tv, tw)
    return mv_two_set(tu, tv, tw, su, sv), tensor_complex(whole, ce)


def nerve_betti(k: SimplicialComplex) -> tuple:
    return complex_cohomology(simplicial_cochain_complex(k)).betti


def glue_report(nerve: SimplicialComplex, g: LieAlgebra, r: Representation | None = None) -> dict:
    dc = cech_ce_double(nerve, g, r)
    total = dc.total_betti
    conv = betti_convolution(nerve_betti(nerve), complex_cohomology(dc.ce).betti)
    return {
        "total_betti": list(total),
        "convolution": list(conv),
        "routes_agree": tuple(total) == tuple(conv),
        "double_complex_identities": not dc.identity_failures(),
    }
