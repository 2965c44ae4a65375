"""Homotopies of Lie algebra morphisms and the flows that transport them.

A curve c: [0, 1] -> h drives a curve of morphisms psi_t: g -> h through

    psi'(t) = -ad_{c(t)} psi(t),

and the same curve drives the adjoint transport Theta_ad' = -ad_c Theta_ad
and, for a representation rho of h, the fiber transport Theta' = -rho(c) Theta.
Everything here is binary64 with classical RK4, except the nilpotent case,
where Picard iteration over Q[t] terminates and all identities are exact.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np
from scipy.linalg import expm

from . import qlinalg as ql
from .ce import build_ce_complex, ce_differentials, pullback_matrices
from .errors import ConditioningWarning, DimensionMismatch
from .liealg import LieAlgebra, LieMorphism, Representation

DEFAULT_TOL = 1e-6
DEFAULT_STEPS = 1000
CONDITION_LIMIT = 1e8


# -- curves --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Curve:
    """c(t) in R^dim, either sum_k data[k] t^k or linear interpolation of
    uniform samples data[0..N] at t = 0, 1/N, .., 1."""

    dim: int
    kind: str
    data: tuple

    def __post_init__(self):
        if self.kind not in ("poly", "samples"):
            raise ValueError(f"unknown curve kind {self.kind!r}")
        rows = tuple(tuple(ql.to_q(x) if not isinstance(x, float) else x for x in r) for r in self.data)
        if not rows:
            raise ValueError("a curve needs at least one coefficient or sample")
        if any(len(r) != self.dim for r in rows):
            raise DimensionMismatch(f"curve entries must have length {self.dim}")
        if self.kind == "samples" and len(rows) < 2:
            raise ValueError("a sampled curve needs at least two samples")
        object.__setattr__(self, "data", rows)

    @classmethod
    def poly(cls, coefficients) -> "Curve":
        coefficients = [list(r) for r in coefficients]
        return cls(len(coefficients[0]), "poly", tuple(coefficients))

    @classmethod
    def samples(cls, values) -> "Curve":
        values = [list(r) for r in values]
        return cls(len(values[0]), "samples", tuple(values))

    @classmethod
    def zero(cls, dim: int) -> "Curve":
        return cls(dim, "poly", ((0,) * dim,))

    @classmethod
    def constant(cls, value) -> "Curve":
        value = list(value)
        return cls(len(value), "poly", (tuple(value),))

    @property
    def is_zero(self) -> bool:
        return all(x == 0 for r in self.data for x in r)

    def _float_rows(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.data])

    def __call__(self, t: float) -> np.ndarray:
        rows = self._float_rows()
        if self.kind == "poly":
            out = np.zeros(self.dim)
            for r in rows[::-1]:
                out = out * t + r
            return out
        n = len(rows) - 1
        s = min(max(t, 0.0), 1.0) * n
        k = min(int(s), n - 1)
        w = s - k
        return (1 - w) * rows[k] + w * rows[k + 1]

    def exact_coefficients(self) -> list[np.ndarray] | None:
        """Rational polynomial coefficients, or None for sampled or float data."""
        if self.kind != "poly" or any(isinstance(x, float) for r in self.data for x in r):
            return None
        return [ql.qvector(r) for r in self.data]


# -- numerics ------------------------------------------------------------------

def _ad_float(structure: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.einsum("i,ijk->kj", x, structure)


def _rho_float(rho: list[np.ndarray], x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(rho[0]) if rho else np.zeros((0, 0))
    for xi, m in zip(x, rho):
        out = out + xi * m
    return out


def rk4_linear(generator, y0: np.ndarray, steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Integrate y' = A(t) y on [0, 1] with classical RK4; returns (times, states)."""
    h = 1.0 / steps
    times = np.linspace(0.0, 1.0, steps + 1)
    ys = np.empty((steps + 1,) + y0.shape)
    ys[0] = y = np.array(y0, dtype=float)
    for n in range(steps):
        t = n * h
        a0, am, a1 = generator(t), generator(t + h / 2), generator(t + h)
        k1 = a0 @ y
        k2 = am @ (y + (h / 2) * k1)
        k3 = am @ (y + (h / 2) * k2)
        k4 = a1 @ (y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        ys[n + 1] = y
    return times, ys


def exp_series(a, terms: int = 30) -> np.ndarray:
    """sum_{k < terms} a^k / k!.

    For a rational matrix the sum stops as soon as a power vanishes, so a
    nilpotent input gives the exact exponential regardless of ``terms``.
    """
    exact = np.asarray(a).dtype == object
    n = np.asarray(a).shape[0]
    out = ql.qeye(n) if exact else np.eye(n)
    term = out.copy()
    k = 1
    while True:
        term = (term @ a) * (Fraction(1, k) if exact else 1.0 / k)
        if exact and ql.is_zero(term):
            return out
        if not exact and k >= terms:
            return out
        if exact and k >= max(terms, n + 1):
            raise ValueError("rational exponential series does not terminate: matrix is not nilpotent")
        out = out + term
        k += 1


def is_nilpotent(a) -> bool:
    a = np.asarray(a, dtype=object)
    n = a.shape[0]
    p = ql.qeye(n)
    for _ in range(n):
        p = p @ a
    return ql.is_zero(p)


# -- the homotopy ODE ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HomotopySolution:
    source: LieAlgebra
    target: LieAlgebra
    psi0: LieMorphism
    times: np.ndarray
    psi: np.ndarray
    step: float

    @property
    def psi1(self) -> np.ndarray:
        return self.psi[-1]


@dataclass(frozen=True, eq=False)
class TransportOperator:
    fiber_dim: int
    times: np.ndarray
    theta: np.ndarray

    def condition_numbers(self) -> np.ndarray:
        return np.array([np.linalg.cond(m) for m in self.theta])


def integrate_homotopy(g: LieAlgebra, h: LieAlgebra, psi0: LieMorphism, c: Curve,
                       steps: int = DEFAULT_STEPS, generator=None) -> HomotopySolution:
    """RK4 for psi' = -ad_{c(t)} psi with psi(0) = psi0.

    ``generator`` replaces t -> -ad_{c(t)} by an arbitrary matrix function;
    only used to build negative controls.
    """
    if steps < 10:
        raise ValueError("steps must be at least 10")
    if c.dim != h.dim:
        raise DimensionMismatch("curve must take values in the target algebra")
    if not (psi0.source.same_as(g) and psi0.target.same_as(h)):
        raise DimensionMismatch("psi0 must be a morphism g -> h")
    if generator is None:
        hs = h.float_structure()

        def generator(t):
            return -_ad_float(hs, c(t))

    times, psi = rk4_linear(generator, ql.to_float(psi0.matrix), steps)
    return HomotopySolution(g, h, psi0, times, psi, 1.0 / steps)


def fiber_transport(rep: Representation, c: Curve, steps: int = DEFAULT_STEPS) -> TransportOperator:
    """Theta' = -rho(c(t)) Theta, Theta(0) = I."""
    rho = [ql.to_float(m) for m in rep.rho]
    times, theta = rk4_linear(lambda t: -_rho_float(rho, c(t)), np.eye(rep.fiber_dim), steps)
    return TransportOperator(rep.fiber_dim, times, theta)


def adjoint_transport(h: LieAlgebra, c: Curve, steps: int = DEFAULT_STEPS) -> TransportOperator:
    """Theta_ad' = -ad_{c(t)} Theta_ad, Theta_ad(0) = I."""
    hs = h.float_structure()
    times, theta = rk4_linear(lambda t: -_ad_float(hs, c(t)), np.eye(h.dim), steps)
    return TransportOperator(h.dim, times, theta)


def defect_curve(sol: HomotopySolution) -> np.ndarray:
    """Per grid point: max_{i<j} |[psi e_i, psi e_j]_h - psi [e_i, e_j]_g|_inf."""
    cg, ch = sol.source.float_structure(), sol.target.float_structure()
    n = sol.source.dim
    iu = np.triu_indices(n, 1)
    out = np.zeros(len(sol.times))
    if len(iu[0]) == 0:
        return out
    for k, p in enumerate(sol.psi):
        lhs = np.einsum("ai,bj,abk->ijk", p, p, ch)
        rhs = np.einsum("ijl,kl->ijk", cg, p)
        out[k] = np.abs(lhs - rhs)[iu].max()
    return out


def morphism_defect(sol: HomotopySolution) -> float:
    return float(defect_curve(sol).max())


def rk4_order_fit(g: LieAlgebra, h: LieAlgebra, psi0: LieMorphism, c: Curve,
                  steps_list=(10, 20, 40, 80), reference_steps: int = 5120) -> dict:
    """Least-squares slopes of log(error) against log(step size).

    ``order`` uses the global error of psi_1 against a run with
    ``reference_steps``; ``defect_order`` uses the morphism defect, which
    converges faster than the solution itself (about h^5 in practice).
    """
    ref = integrate_homotopy(g, h, psi0, c, reference_steps).psi1
    sols = [integrate_homotopy(g, h, psi0, c, s) for s in steps_list]
    errors = [float(np.abs(s.psi1 - ref).max()) for s in sols]
    defects = [morphism_defect(s) for s in sols]
    log_h = np.log([1.0 / s for s in steps_list])

    def slope(ys):
        if min(ys) <= 0:
            return None
        return float(np.polyfit(log_h, np.log(ys), 1)[0])

    return {"steps": list(steps_list), "errors": errors, "order": slope(errors),
            "defects": defects, "defect_order": slope(defects)}


def constant_curve_oracle_error(sol: HomotopySolution, c0) -> float:
    """max_t |psi_t - expm(-t ad_{c0}) psi0| for a constant curve c0."""
    a = -_ad_float(sol.target.float_structure(), Curve.constant(c0)(0.0))
    p0 = ql.to_float(sol.psi0.matrix)
    return float(max(np.abs(p - expm(t * a) @ p0).max() for t, p in zip(sol.times, sol.psi)))


def triviality_check(sol: HomotopySolution, c: Curve, rep: Representation | None = None,
                     tol: float = DEFAULT_TOL) -> dict:
    """Compare psi_t with Theta_ad(t) psi0, integrated independently.

    With ``rep`` the fiber transport is integrated as well and the gauge
    residual max_t,x |rho(psi_t x) Theta - Theta rho(psi0 x)| is reported.
    """
    steps = len(sol.times) - 1
    tad = adjoint_transport(sol.target, c, steps)
    p0 = ql.to_float(sol.psi0.matrix)
    res = float(max(np.abs(p - t @ p0).max() for p, t in zip(sol.psi, tad.theta)))
    out = {"steps": steps, "residual": res, "tol": tol, "passed": res <= tol}
    if rep is not None:
        tr = fiber_transport(rep, c, steps)
        gres = max(_gauge_residual(rep, p, p0, th) for p, th in zip(sol.psi, tr.theta))
        out["gauge_residual"] = gres
        out["passed"] = out["passed"] and gres <= tol
    return out


def _gauge_residual(rep: Representation, psi_t: np.ndarray, psi0: np.ndarray, theta: np.ndarray) -> float:
    rho = [ql.to_float(m) for m in rep.rho]
    worst = 0.0
    for i in range(psi0.shape[1]):
        r1 = _rho_float(rho, psi_t[:, i])
        r0 = _rho_float(rho, psi0[:, i])
        worst = max(worst, float(np.abs(r1 @ theta - theta @ r0).max()) if r0.size else 0.0)
    return worst


# -- exact nilpotent case ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PolyMatrix:
    """sum_e t^e coeffs[e] with rational matrix coefficients."""

    coeffs: dict

    def __call__(self, t) -> np.ndarray:
        t = ql.to_q(t)
        out = None
        for e, m in self.coeffs.items():
            out = (t ** e) * m if out is None else out + (t ** e) * m
        return out

    def derivative(self) -> "PolyMatrix":
        return PolyMatrix({e - 1: e * m for e, m in self.coeffs.items() if e > 0})

    @property
    def degree(self) -> int:
        return max(self.coeffs, default=-1)


def _poly_ad(h: LieAlgebra, coeffs: list[np.ndarray]) -> dict:
    return {e: h.ad(v) for e, v in enumerate(coeffs) if not ql.is_zero(v)}


def exact_transport(h: LieAlgebra, c: Curve, start: np.ndarray, max_terms: int = 64) -> PolyMatrix:
    """Y' = -ad_{c(t)} Y, Y(0) = start, solved over Q[t] by Picard iteration.

    Terminates when h is nilpotent (products of enough ad's vanish);
    raises ValueError otherwise.
    """
    coeffs = c.exact_coefficients()
    if coeffs is None:
        raise ValueError("exact transport needs a rational polynomial curve")
    ad = _poly_ad(h, coeffs)
    start = np.asarray(start, dtype=object)
    total = {0: start.copy()}
    term = {0: start.copy()}
    for _ in range(max_terms):
        nxt = {}
        for e1, a in ad.items():
            for e2, m in term.items():
                prod = a @ m
                e = e1 + e2 + 1
                nxt[e] = nxt[e] - prod / e if e in nxt else -prod / e
        term = {e: m for e, m in nxt.items() if not ql.is_zero(m)}
        if not term:
            return PolyMatrix(dict(sorted(total.items())))
        for e, m in term.items():
            total[e] = total[e] + m if e in total else m
    raise ValueError("Picard iteration did not terminate: target algebra is not nilpotent along c")


def exact_homotopy_check(g: LieAlgebra, h: LieAlgebra, psi0: LieMorphism, c: Curve,
                         sample_times=(0, Fraction(1, 3), Fraction(1, 2), 1)) -> dict:
    """Exact versions of the ODE, morphism and triviality identities."""
    psi = exact_transport(h, c, psi0.matrix)
    theta_ad = exact_transport(h, c, ql.qeye(h.dim))
    ad = _poly_ad(h, c.exact_coefficients())
    # psi' + ad_c psi as a polynomial identity
    resid = {e: m.copy() for e, m in psi.derivative().coeffs.items()}
    for e1, a in ad.items():
        for e2, m in psi.coeffs.items():
            e = e1 + e2
            resid[e] = resid[e] + a @ m if e in resid else a @ m
    ode_exact = all(ql.is_zero(m) for m in resid.values())
    morphism_exact = True
    for t in sample_times:
        p = psi(t)
        for i in range(g.dim):
            for j in range(i + 1, g.dim):
                lhs = h.bracket(p[:, i], p[:, j])
                rhs = p @ g.structure[i, j]
                if not ql.is_zero(lhs - rhs):
                    morphism_exact = False
    trivial_exact = all(ql.is_zero(psi(t) - theta_ad(t) @ psi0.matrix) for t in sample_times)
    return {
        "polynomial_degree": psi.degree,
        "ode_exact": ode_exact,
        "morphism_exact": morphism_exact,
        "triviality_exact": trivial_exact,
        "psi1": [[ql.format_q(x) for x in row] for row in psi(1)],
        "passed": ode_exact and morphism_exact and trivial_exact,
    }


# -- flows at a point ----------------------------------------------------------

def flow_derivation_check(D, e, h: float = 1e-3, halvings: int = 4, fit_h: float = 0.1) -> dict:
    """Central difference of t -> exp(tD) e at t = 0 against D e.

    The flow Xi_t = exp(-tD) acts on sections by (Xi_t * e) = Xi_{-t} e, so
    its derivative at 0 is D e. The error is relative to |D e| (absolute when
    D e = 0). The order is fitted on h = fit_h, fit_h/2, ...
    """
    D = np.asarray(D, dtype=float)
    e = np.asarray(e, dtype=float)
    target = D @ e
    scale = max(float(np.abs(target).max()), 1.0) if target.size else 1.0

    def err(step):
        fd = (expm(step * D) @ e - expm(-step * D) @ e) / (2 * step)
        return float(np.abs(fd - target).max()) / scale

    hs = [fit_h / 2 ** k for k in range(halvings)]
    errs = [err(s) for s in hs]
    order = None
    if min(errs) > 0:
        order = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    return {"h": h, "error": err(h), "fit_steps": hs, "fit_errors": errs, "order": order}


def _rational_inputs(*xs) -> bool:
    for x in xs:
        arr = np.asarray(x, dtype=object).reshape(-1)
        if any(isinstance(v, (float, np.floating)) for v in arr):
            return False
    return True


def bracket_invariance_check(g: LieAlgebra, a, lam, terms: int = 30) -> dict:
    """max over basis pairs |[X b, X c] - X [b, c]| for X = exp(lam ad_a).

    Runs over Q when a and lam are rational and ad_a is nilpotent.
    """
    exact = _rational_inputs(a, lam) and is_nilpotent(g.ad(ql.qvector(a)))
    if exact:
        x = exp_series(ql.to_q(lam) * g.ad(ql.qvector(a)))
        worst = Fraction(0)
        for i in range(g.dim):
            for j in range(i + 1, g.dim):
                r = g.bracket(x[:, i], x[:, j]) - x @ g.structure[i, j]
                worst = max([worst] + [abs(v) for v in r])
        return {"exact": True, "residual": float(worst), "residual_exact": ql.format_q(worst)}
    cs = g.float_structure()
    x = exp_series(float(lam) * _ad_float(cs, np.asarray(a, dtype=float)), terms)
    lhs = np.einsum("ai,bj,abk->ijk", x, x, cs)
    rhs = np.einsum("ijl,kl->ijk", cs, x)
    return {"exact": False, "residual": float(np.abs(lhs - rhs).max()) if g.dim else 0.0, "terms": terms}


def semidirect_flow_check(g: LieAlgebra, r: Representation, a, b, e, lam, terms: int = 30) -> dict:
    """|rho(exp(-lam ad_a) b) exp(-lam rho(a)) e - exp(-lam rho(a)) rho(b) e|."""
    if not r.algebra.same_as(g):
        raise DimensionMismatch("representation lives on a different algebra")
    a_q = ql.qvector(a) if _rational_inputs(a) else None
    exact = (_rational_inputs(a, b, e, lam) and is_nilpotent(g.ad(a_q))
             and is_nilpotent(r.action(a_q)))
    if exact:
        lam = ql.to_q(lam)
        psi = exp_series(-lam * g.ad(a_q))
        xi = exp_series(-lam * r.action(a_q))
        ev = ql.qvector(e)
        lhs = r.action(psi @ ql.qvector(b)) @ (xi @ ev)
        rhs = xi @ (r.action(ql.qvector(b)) @ ev)
        worst = max((abs(v) for v in lhs - rhs), default=Fraction(0))
        return {"exact": True, "residual": float(worst), "residual_exact": ql.format_q(worst)}
    cs = g.float_structure()
    rho = [ql.to_float(m) for m in r.rho]
    a, b, e = (np.asarray(v, dtype=float) for v in (a, b, e))
    lam = float(lam)
    psi = exp_series(-lam * _ad_float(cs, a), terms)
    xi = exp_series(-lam * _rho_float(rho, a), terms)
    lhs = _rho_float(rho, psi @ b) @ (xi @ e)
    rhs = xi @ (_rho_float(rho, b) @ e)
    return {"exact": False, "residual": float(np.abs(lhs - rhs).max()) if len(e) else 0.0, "terms": terms}


# -- the full comparison -------------------------------------------------------

def _coboundary_distance(d_prev: np.ndarray, v: np.ndarray) -> float:
    """Distance from v to the column space of d_prev (least squares)."""
    if d_prev.size == 0 or d_prev.shape[1] == 0:
        return float(np.abs(v).max()) if v.size else 0.0
    x, *_ = np.linalg.lstsq(d_prev, v, rcond=None)
    return float(np.abs(d_prev @ x - v).max())


def main_theorem_check(g: LieAlgebra, h: LieAlgebra, psi0: LieMorphism, c: Curve,
                       rep: Representation, steps: int = DEFAULT_STEPS,
                       tol: float = DEFAULT_TOL) -> dict:
    """Gauge relation between the pullbacks of ``rep`` along psi_0 and psi_1,
    and agreement of the two induced maps in cohomology up to that gauge.

    (1) Theta' = -rho(c) Theta; residual max_x |rho(psi_1 x) Theta(1) - Theta(1) rho(psi_0 x)|.
    (2) For a basis of closed cochains w of Omega(h, E):
        (I x Theta(1)) Phi_0^* w - Phi_1^* w lies in the coboundaries of
        Omega(g, Phi_1^! E); reported as a least-squares distance.
    """
    if not rep.algebra.same_as(h):
        raise DimensionMismatch("representation must live on the target algebra")
    sol = integrate_homotopy(g, h, psi0, c, steps)
    tr = fiber_transport(rep, c, steps)
    theta = tr.theta[-1]
    cond = float(np.linalg.cond(theta)) if theta.size else 1.0
    if cond > CONDITION_LIMIT:
        warnings.warn(f"transport operator has condition number {cond:.3g}", ConditioningWarning)
    p0, p1 = ql.to_float(psi0.matrix), sol.psi1
    gauge = _gauge_residual(rep, p1, p0, theta)

    n, m, f = g.dim, h.dim, rep.fiber_dim
    rho = [ql.to_float(x) for x in rep.rho]
    cg = g.float_structure()
    rho0 = [_rho_float(rho, p0[:, i]) for i in range(n)]
    rho1 = [_rho_float(rho, p1[:, i]) for i in range(n)]
    d0 = ce_differentials(cg, rho0, f, exact=False)
    d1 = ce_differentials(cg, rho1, f, exact=False)
    lift = [np.kron(np.eye(comb(n, k)), theta) for k in range(n + 1)]
    chain_res = max((float(np.abs(d1[k] @ lift[k] - lift[k + 1] @ d0[k]).max())
                     for k in range(n) if d0[k].size), default=0.0)

    big = build_ce_complex(h, rep)
    length = max(n, m) + 1
    pb0 = pullback_matrices(p0, n, m, f, exact=False, length=length)
    pb1 = pullback_matrices(p1, n, m, f, exact=False, length=length)
    distances = []
    for k in range(min(n, m) + 1):
        z = ql.kernel_basis(big.d(k)) if k < m else ql.SubspaceBasis.standard(big.dims[k])
        dprev = d1[k - 1] if k > 0 else np.zeros((comb(n, k) * f, 0))
        worst = 0.0
        for w in z.vectors:
            wf = ql.to_float(w)
            v = lift[k] @ (pb0[k] @ wf) - pb1[k] @ wf
            worst = max(worst, _coboundary_distance(dprev, v))
        distances.append(worst)
    psi_constant = bool(np.all(sol.psi == sol.psi[0]))
    coh = max(distances, default=0.0)
    return {
        "steps": steps,
        "tol": tol,
        "morphism_defect": morphism_defect(sol),
        "gauge_residual": gauge,
        "transport_chain_residual": chain_res,
        "cohomology_distance": distances,
        "theta_condition": cond,
        "psi_constant": psi_constant,
        "passed": gauge <= tol and coh <= tol and chain_res <= tol,
    }
