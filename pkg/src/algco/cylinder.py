"""Polynomial model of the cylinder complex over TI x g.

Every form of degree k on TI x g with coefficients in Q[t] splits uniquely as

    sum_e t^e * w_e  +  sum_e t^e * dt ^ n_e,     w_e in Omega^k(g, F), n_e in Omega^{k-1}(g, F)

and the operators below act on those two sparse polynomial parts directly.
Since K raises the polynomial degree, nothing here is a fixed-size matrix.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import qlinalg as ql
from .ce import CEComplex
from .complexes import GenericComplex


def _clean(part: dict) -> dict:
    return {e: v for e, v in sorted(part.items()) if len(v) and not ql.is_zero(v)}


def _add_into(part: dict, e: int, v) -> None:
    if e in part:
        part[e] = part[e] + v
    else:
        part[e] = np.asarray(v, dtype=object).copy()


@dataclass(frozen=True, eq=False)
class PolyCylinderForm:
    degree: int
    base: dict = field(default_factory=dict)
    dt: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "base", _clean(self.base))
        object.__setattr__(self, "dt", _clean(self.dt))
        if self.degree == 0 and self.dt:
            raise ValueError("a 0-form has no dt part")

    def is_zero(self) -> bool:
        return not self.base and not self.dt

    def __add__(self, other: "PolyCylinderForm") -> "PolyCylinderForm":
        if other.degree != self.degree:
            raise ValueError("adding forms of different degree")
        base, dt = dict(self.base), dict(self.dt)
        for e, v in other.base.items():
            _add_into(base, e, v)
        for e, v in other.dt.items():
            _add_into(dt, e, v)
        return PolyCylinderForm(self.degree, base, dt)

    def scale(self, a) -> "PolyCylinderForm":
        a = ql.to_q(a)
        return PolyCylinderForm(self.degree,
                                {e: a * v for e, v in self.base.items()},
                                {e: a * v for e, v in self.dt.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def poly_degree(self) -> int:
        return max(list(self.base) + list(self.dt), default=-1)

    def first_nonzero_term(self, ce: CEComplex):
        """(part, exponent, subset, fiber index, value) of the first nonzero coefficient."""
        for part, k, terms in (("base", self.degree, self.base), ("dt", self.degree - 1, self.dt)):
            for e, v in terms.items():
                for i, x in enumerate(v):
                    if x != 0:
                        subset, f = ce.basis_label(k, i)
                        return part, e, subset, f, x
        return None


class CylinderComplex:
    """Omega(TI x g, pr^! F) with the pulled-back representation."""

    def __init__(self, ce: CEComplex):
        self.ce = ce

    def zero(self, k: int) -> PolyCylinderForm:
        return PolyCylinderForm(k)

    def differential(self, f: PolyCylinderForm) -> PolyCylinderForm:
        """d(p w) = p' dt ^ w + p d w  and  d(p dt ^ n) = -p dt ^ d n."""
        k = f.degree
        dk = self.ce.d(k)
        base = {e: dk @ v for e, v in f.base.items()}
        dt = {}
        for e, v in f.base.items():
            if e > 0:
                _add_into(dt, e - 1, e * v)
        dk1 = self.ce.d(k - 1)
        for e, v in f.dt.items():
            _add_into(dt, e, -(dk1 @ v))
        return PolyCylinderForm(k + 1, base, dt)

    def proj_pullback(self, omega, k: int) -> PolyCylinderForm:
        return PolyCylinderForm(k, {0: ql.qvector(omega)})

    def incl_pullback(self, t0, f: PolyCylinderForm) -> np.ndarray:
        """Evaluate the base part at t = t0; dt restricts to zero."""
        t0 = ql.to_q(t0)
        out = ql.qzeros(self.ce.dim(f.degree))
        for e, v in f.base.items():
            out = out + (t0 ** e) * v
        return out

    def homotopy_K(self, f: PolyCylinderForm) -> PolyCylinderForm:
        """K(p w) = 0,  K(p dt ^ n) = (-1)^(k-1) (int_0^t p) n  for a k-form."""
        k = f.degree
        if k == 0:
            return PolyCylinderForm(-1)
        sign = 1 if (k - 1) % 2 == 0 else -1
        base = {e + 1: Fraction(sign, e + 1) * v for e, v in f.dt.items()}
        return PolyCylinderForm(k - 1, base)

    def homotopy_residual(self, f: PolyCylinderForm) -> PolyCylinderForm:
        """(id - Pr* I_0*) f  -  (-1)^(k-1) (dK - Kd) f; identically zero."""
        k = f.degree
        lhs = f - self.proj_pullback(self.incl_pullback(0, f), k)
        kd = self.homotopy_K(self.differential(f))
        if k == 0:
            dk_minus_kd = -kd
        else:
            dk_minus_kd = self.differential(self.homotopy_K(f)) - kd
        sign = 1 if (k - 1) % 2 == 0 else -1
        return lhs - dk_minus_kd.scale(sign)

    def primitive(self, f: PolyCylinderForm) -> PolyCylinderForm:
        """For closed f of degree >= 1: a form b with d b = f - Pr*(I_0* f)."""
        sign = 1 if (f.degree - 1) % 2 == 0 else -1
        return self.homotopy_K(f).scale(sign)

    def random_form(self, k: int, max_poly_degree: int, rng: random.Random,
                    density: float = 0.5, bound: int = 5) -> PolyCylinderForm:
        def vec(n):
            return ql.qvector([
                Fraction(rng.randint(-bound, bound), rng.randint(1, 3)) if rng.random() < density else 0
                for _ in range(n)
            ])
        base = {e: vec(self.ce.dim(k)) for e in range(max_poly_degree + 1)}
        dt = {e: vec(self.ce.dim(k - 1)) for e in range(max_poly_degree + 1)} if k > 0 else {}
        return PolyCylinderForm(k, base, dt)

    # -- finite truncation -------------------------------------------------

    def _slot_sizes(self, k: int, D: int) -> tuple[int, int]:
        nb = (D + 1) * self.ce.dim(k)
        nd = D * self.ce.dim(k - 1) if k > 0 else 0
        return nb, nd

    def flatten(self, f: PolyCylinderForm, D: int) -> np.ndarray:
        k = f.degree
        nb, nd = self._slot_sizes(k, D)
        out = ql.qzeros(nb + nd)
        mb, md = self.ce.dim(k), self.ce.dim(k - 1)
        for e, v in f.base.items():
            if e > D:
                raise ValueError("form exceeds truncation degree")
            out[e * mb:(e + 1) * mb] = v
        for e, v in f.dt.items():
            if e > D - 1:
                raise ValueError("form exceeds truncation degree")
            out[nb + e * md:nb + (e + 1) * md] = v
        return out

    def unflatten(self, k: int, v, D: int) -> PolyCylinderForm:
        nb, _ = self._slot_sizes(k, D)
        mb, md = self.ce.dim(k), self.ce.dim(k - 1)
        base = {e: v[e * mb:(e + 1) * mb] for e in range(D + 1)}
        dt = {e: v[nb + e * md:nb + (e + 1) * md] for e in range(D)} if k > 0 else {}
        return PolyCylinderForm(k, base, dt)

    def truncated_complex(self, D: int) -> GenericComplex:
        """Subcomplex with base polynomials of degree <= D and dt coefficients of degree <= D-1."""
        top = self.ce.top + 1
        dims = [sum(self._slot_sizes(k, D)) for k in range(top + 1)]
        diffs = []
        for k in range(top):
            m = ql.qzeros(dims[k + 1], dims[k])
            for j in range(dims[k]):
                e = ql.qzeros(dims[k])
                e[j] = Fraction(1)
                m[:, j] = self.flatten(self.differential(self.unflatten(k, e, D)), D)
            diffs.append(m)
        return GenericComplex(tuple(dims), tuple(diffs))


def cyl_differential(cyl: CylinderComplex, f: PolyCylinderForm) -> PolyCylinderForm:
    return cyl.differential(f)


def proj_pullback(cyl: CylinderComplex, omega, k: int) -> PolyCylinderForm:
    return cyl.proj_pullback(omega, k)


def incl_pullback(cyl: CylinderComplex, t0, f: PolyCylinderForm) -> np.ndarray:
    return cyl.incl_pullback(t0, f)


def homotopy_K(cyl: CylinderComplex, f: PolyCylinderForm) -> PolyCylinderForm:
    return cyl.homotopy_K(f)


def verify_homotopy_identity(cyl: CylinderComplex, f: PolyCylinderForm) -> PolyCylinderForm:
    return cyl.homotopy_residual(f)
