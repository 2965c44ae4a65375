import random
from fractions import Fraction

import numpy as np
import pytest

from algco import ce
from algco import qlinalg as ql
from algco import liealg as la
from algco.errors import DegreeOverflow, DimensionMismatch, FlatnessViolated, NotGaugeEquivalent

from generators import SHIPPED, random_invertible, random_morphism, shipped_reps
from oracles import betti_from_ranks, brute_ce_differential, brute_pullback, ce_dims


ALL = ["abelian1", "abelian2", "abelian3", "abelian4", "abelian5", "heisenberg3", "sl2", "so3"]


def _cases():
    for name in ["abelian2", "abelian3", "heisenberg3", "sl2", "so3"]:
        g = la.BUILTIN_ALGEBRAS[name]()
        for i, r in enumerate(shipped_reps(g)):
            yield pytest.param(g, r, id=f"{name}-{i}")


@pytest.mark.parametrize("g,r", list(_cases()))
def test_differential_matches_multilinear_oracle(g, r):
    c = ce.build_ce_complex(g, r)
    for k in range(g.dim):
        assert np.all(c.d(k) == brute_ce_differential(g.structure, r.rho, r.fiber_dim, k))


@pytest.mark.parametrize("name", ALL)
def test_d_squared_zero(name):
    g = la.BUILTIN_ALGEBRAS[name]()
    for r in shipped_reps(g):
        c = ce.build_ce_complex(g, r)
        assert c.square_defects() == []
        assert c.dims == ce_dims(g.dim, r.fiber_dim)


def test_broken_rep_rejected_with_report():
    g = la.sl2()
    r = la.Representation(g, 2, (ql.qmatrix([[2, 0], [0, -1]]), ql.qmatrix([[0, 1], [0, 0]]),
                                  ql.qmatrix([[0, 0], [1, 0]])))
    with pytest.raises(FlatnessViolated) as exc:
        ce.build_ce_complex(g, r)
    assert exc.value.report


def test_mismatched_rep_rejected():
    with pytest.raises(DimensionMismatch):
        ce.build_ce_complex(la.so3(), la.sl2_fundamental())


@pytest.mark.parametrize("name,expected", [
    ("abelian3", (1, 3, 3, 1)),
    ("sl2", (1, 0, 0, 1)),
    ("heisenberg3", (1, 2, 2, 1)),
    ("so3", (1, 0, 0, 1)),
])
def test_trivial_betti_fixtures(name, expected):
    g = la.BUILTIN_ALGEBRAS[name]()
    c = ce.build_ce_complex(g, la.trivial_rep(g))
    h = ce.cohomology(c)
    assert h.betti == expected
    assert betti_from_ranks(c.dims, c.diff) == expected


@pytest.mark.parametrize("g,r", list(_cases()))
def test_betti_matches_sympy_ranks(g, r):
    c = ce.build_ce_complex(g, r)
    h = ce.cohomology(c)
    assert h.betti == betti_from_ranks(c.dims, c.diff)
    for k, reps in enumerate(h.representatives):
        assert h.betti[k] == h.cocycle_dims[k] - h.coboundary_dims[k]
        for v in reps.vectors:
            if k < len(c.diff):
                assert ql.is_zero(c.d(k) @ v)


def test_abelian_trivial_is_zero_differential():
    c = ce.build_ce_complex(la.abelian(4), la.trivial_rep(la.abelian(4)))
    assert all(ql.is_zero(d) for d in c.diff)


def test_small_differentials():
    g = la.abelian(1)
    c = ce.build_ce_complex(g, la.representation(g, [[[1]]]))
    assert c.d(0).tolist() == [[1]]
    s = la.sl2()
    c = ce.build_ce_complex(s, la.trivial_rep(s))
    assert ql.is_zero(c.d(0))
    # d h*(e, f) = -h*([e, f]) = -1 on the (e, f) coordinate
    col = c.d(1)[:, c.index((0,))]
    assert col[c.index((1, 2))] == -1


def test_basis_index_roundtrip():
    c = ce.build_ce_complex(la.sl2(), la.sl2_fundamental())
    for k in range(4):
        for i in range(c.dims[k]):
            s, f = c.basis_label(k, i)
            assert c.index(s, f) == i


def test_pullback_matches_oracle_and_commutes():
    rng = random.Random(11)
    for _ in range(15):
        phi = random_morphism(rng)
        for r in shipped_reps(phi.target)[:2]:
            src = ce.build_ce_complex(phi.target, r)
            cm = ce.pullback_cochain_map(phi, src)
            assert cm.is_chain_map()
            for k in range(min(phi.source.dim, phi.target.dim) + 1):
                assert np.all(cm.maps[k] == brute_pullback(phi.matrix, phi.source.dim, phi.target.dim,
                                                           r.fiber_dim, k))


def test_pullback_special_cases():
    s = la.sl2()
    c = ce.build_ce_complex(s, la.adjoint_rep(s))
    cm = ce.pullback_cochain_map(la.identity_morphism(s), c)
    assert all(np.all(m == ql.qeye(m.shape[0])) for m in cm.maps)
    z = ce.pullback_cochain_map(la.zero_morphism(s, s), c)
    assert np.all(z.maps[0] == ql.qeye(3))
    assert all(ql.is_zero(m) for m in z.maps[1:])
    inc = la.morphism(la.abelian(1), s, [[1], [0], [0]])
    m1 = ce.pullback_cochain_map(inc, ce.build_ce_complex(s, la.trivial_rep(s))).maps[1]
    assert m1.tolist() == [[1, 0, 0]]


def test_pullback_functoriality():
    rng = random.Random(5)
    for _ in range(10):
        psi = random_morphism(rng)
        phi = random_morphism(rng, src=psi.target)
        for r in shipped_reps(phi.target)[:2]:
            c = ce.build_ce_complex(phi.target, r)
            a = ce.pullback_cochain_map(phi, c)
            b = ce.pullback_cochain_map(psi, a.target)
            comp = ce.pullback_cochain_map(phi.compose(psi), c)
            common = min(len(a.maps), len(b.maps), len(comp.maps))
            for k in range(common):
                assert np.all(comp.maps[k] == b.maps[k] @ a.maps[k])
            assert all(ql.is_zero(m) for m in comp.maps[common:])


def test_wedge_basics():
    n = 2
    one = ql.qvector([1])
    eta = ql.qvector([3, 4])
    assert list(ce.wedge(n, one, 0, eta, 1)) == [3, 4]
    e1 = ql.qvector([1, 0])
    e2 = ql.qvector([0, 1])
    assert ql.is_zero(ce.wedge(n, e1, 1, e1, 1))
    assert list(ce.wedge(n, e1, 1, e2, 1)) == [-x for x in ce.wedge(n, e2, 1, e1, 1)]
    with pytest.warns(DegreeOverflow):
        out = ce.wedge(n, e1, 1, ql.qvector([1]), 2)
    assert ql.is_zero(out)


def test_wedge_leibniz():
    rng = random.Random(2)
    for g, r in [(la.sl2(), la.sl2_fundamental()), (la.heisenberg3(), la.adjoint_rep(la.heisenberg3()))]:
        cs = ce.build_ce_complex(g, la.trivial_rep(g))
        c = ce.build_ce_complex(g, r)
        n, m = g.dim, r.fiber_dim
        for k in range(n):
            for l in range(n - k):
                w = ql.qvector([Fraction(rng.randint(-3, 3)) for _ in range(cs.dims[k])])
                e = ql.qvector([Fraction(rng.randint(-3, 3)) for _ in range(c.dims[l])])
                lhs = c.d(k + l) @ ce.wedge(n, w, k, e, l, m)
                rhs = ce.wedge(n, cs.d(k) @ w, k + 1, e, l, m) + \
                    (-1) ** k * ce.wedge(n, w, k, c.d(l) @ e, l + 1, m)
                assert ql.is_zero(lhs - rhs)


def test_cup_product_descends():
    rng = random.Random(4)
    g = la.abelian(2)
    r = la.weight_rep(g, [[1, 0], [0, 0]])
    cs = ce.build_ce_complex(g, la.trivial_rep(g))
    c = ce.build_ce_complex(g, r)
    hs, h = ce.cohomology(cs), ce.cohomology(c)
    for k in range(3):
        for l in range(3 - k):
            for w in hs.representatives[k].vectors:
                for e in h.representatives[l].vectors:
                    th = ql.qvector([rng.randint(-2, 2) for _ in range(cs.dims[k - 1])]) if k else None
                    xi = ql.qvector([rng.randint(-2, 2) for _ in range(c.dims[l - 1])]) if l else None
                    assert ce.cup_class_is_well_defined(cs, c, w, k, e, l, th, xi)


def test_gauge_transport_examples():
    s = la.sl2()
    r = la.adjoint_rep(s)
    c = ce.build_ce_complex(s, r)
    t = ce.gauge_transport(ce.GaugeMap(r, r, ql.qeye(3)), c)
    assert t.chain_map.is_chain_map() and all(np.all(m == ql.qeye(m.shape[0])) for m in t.chain_map.maps)
    t2 = ce.gauge_transport(ce.GaugeMap(r, r, 2 * ql.qeye(3)), c)
    assert t2.induced_invertible() and t2.betti_equal
    rng = random.Random(8)
    p = random_invertible(rng, 3)
    rp = la.conjugate_rep(r, p)
    t3 = ce.gauge_transport(ce.GaugeMap(r, rp, p), c)
    assert t3.betti_equal and t3.chain_map.is_chain_map() and t3.induced_invertible()
    with pytest.raises(NotGaugeEquivalent):
        ce.gauge_transport(ce.GaugeMap(r, rp, ql.qeye(3)), c)


def test_whitehead_spot_check():
    for g in (la.sl2(), la.so3()):
        b = ce.cohomology(ce.build_ce_complex(g, la.trivial_rep(g))).betti
        assert b[1] == b[2] == 0


def test_float_path_matches_exact():
    g = la.so3()
    r = la.adjoint_rep(g)
    ex = ce.ce_differentials(g.structure, r.rho, 3)
    fl = ce.ce_differentials(g.float_structure(), [m.astype(float) for m in r.rho], 3, exact=False)
    for a, b in zip(ex, fl):
        assert np.allclose(a.astype(float), b)


def test_cohomology_json():
    h = ce.cohomology(ce.build_ce_complex(la.heisenberg3(), la.trivial_rep(la.heisenberg3())))
    out = h.to_json(representatives=True)
    assert out["betti"] == [1, 2, 2, 1]
    assert all(isinstance(x, str) for reps in out["representatives"] for v in reps for x in v)


def test_shipped_list_is_covered():
    assert set(SHIPPED) <= set(la.BUILTIN_ALGEBRAS)
