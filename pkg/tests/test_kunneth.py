import random
from itertools import combinations_with_replacement

import numpy as np
import pytest

from algco import kunneth as kn
from algco import qlinalg as ql
from algco import liealg as la
from algco.errors import DimensionMismatch

from generators import random_invertible
from oracles import cochain_to_dict, dict_to_cochain, extend_cochain, shuffle_wedge

SMALL = ["abelian1", "abelian2", "heisenberg3", "sl2", "so3"]


@pytest.mark.parametrize("a,b", list(combinations_with_replacement(SMALL, 2)))
def test_trivial_pairs_two_routes(a, b):
    g, h = la.BUILTIN_ALGEBRAS[a](), la.BUILTIN_ALGEBRAS[b]()
    rep = kn.kunneth_crosscheck(g, h)
    assert rep["match"], rep
    assert rep["full_rank"] and rep["chain_map"]
    assert rep["closed_to_closed"] and rep["classes_span"]


def test_known_products():
    assert kn.kunneth_crosscheck(la.sl2(), la.abelian(1))["direct"] == [1, 1, 0, 1, 1]
    hh = kn.kunneth_crosscheck(la.heisenberg3(), la.heisenberg3())
    assert hh["direct"] == [1, 4, 8, 10, 8, 4, 1]


def test_nontrivial_reps():
    cases = [
        (la.sl2(), la.heisenberg3(), la.sl2_fundamental(), la.adjoint_rep(la.heisenberg3())),
        (la.abelian(1), la.abelian(2), la.representation(la.abelian(1), [[[1]]]),
         la.weight_rep(la.abelian(2), [[-1], [0]])),
        (la.so3(), la.abelian(1), la.adjoint_rep(la.so3()), None),
    ]
    for g, h, rE, rF in cases:
        rep = kn.kunneth_crosscheck(g, h, rE, rF)
        assert rep["match"] and rep["full_rank"] and rep["chain_map"], rep


def test_conjugated_reps_keep_both_routes_equal():
    rng = random.Random(13)
    for _ in range(4):
        p = random_invertible(rng, 2)
        q = random_invertible(rng, 3)
        rE = la.conjugate_rep(la.sl2_fundamental(), p)
        rF = la.conjugate_rep(la.adjoint_rep(la.heisenberg3()), q)
        rep = kn.kunneth_crosscheck(la.sl2(), la.heisenberg3(), rE, rF)
        assert rep["match"] and rep["chain_map"]


def test_map_matches_shuffle_wedge_oracle():
    rng = random.Random(21)
    g, h = la.sl2(), la.heisenberg3()
    rE, rF = la.sl2_fundamental(), la.adjoint_rep(h)
    km = kn.kunneth_chain_map(g, h, rE, rF)
    n, m = g.dim, h.dim
    mE, mF = rE.fiber_dim, rF.fiber_dim
    for p in range(n + 1):
        for q in range(m + 1):
            w = ql.qvector([rng.randint(-3, 3) for _ in range(km.left.dim(p))])
            f = ql.qvector([rng.randint(-3, 3) for _ in range(km.right.dim(q))])
            got = km.apply(w, p, f, q)
            alpha = cochain_to_dict(w, n, p, mE)
            beta = extend_cochain(cochain_to_dict(f, m, q, mF), n)
            expect = dict_to_cochain(shuffle_wedge(n + m, alpha, p, mE, beta, q, mF), n + m, p + q, mE * mF)
            assert np.all(got == expect)


def test_koszul_spot_checks():
    rng = random.Random(3)
    for a, b in [("sl2", "heisenberg3"), ("abelian2", "so3"), ("heisenberg3", "heisenberg3")]:
        km = kn.kunneth_chain_map(la.BUILTIN_ALGEBRAS[a](), la.BUILTIN_ALGEBRAS[b]())
        assert kn.koszul_spot_check(km, rng, trials=40) == []
    km = kn.kunneth_chain_map(la.sl2(), la.abelian(1), la.sl2_fundamental())
    with pytest.raises(DimensionMismatch):
        kn.koszul_spot_check(km, rng)


def test_apply_rejects_wrong_lengths():
    km = kn.kunneth_chain_map(la.abelian(1), la.abelian(1))
    with pytest.raises(DimensionMismatch):
        km.apply(ql.qvector([1, 2]), 0, ql.qvector([1]), 0)
