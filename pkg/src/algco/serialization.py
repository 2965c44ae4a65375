"""JSON input formats. Rationals are strings "p/q" (plain integers also accepted).

Algebra references are either inline objects, builtin names
(``sl2``, ``so3``, ``heisenberg3``, ``abelianN``) or paths relative to the
referencing file.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import jsonschema
import numpy as np

from . import qlinalg as ql
from .errors import DimensionMismatch, SchemaError
from .homological import SimplicialComplex, circle, point, sphere
from .liealg import (
    BUILTIN_ALGEBRAS,
    LieAlgebra,
    LieMorphism,
    Representation,
    abelian,
    adjoint_rep,
    lie_algebra,
    trivial_rep,
)

DATA_DIR = Path(__file__).parent / "data"

_RATIONAL = {"type": ["string", "integer"], "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _RATIONAL}}
_REF = {"type": ["string", "object"]}

ALGEBRA_SCHEMA = {
    "type": "object",
    "required": ["dim", "brackets"],
    "properties": {
        "name": {"type": "string"},
        "dim": {"type": "integer", "minimum": 0},
        "brackets": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["i", "j", "coeffs"],
                "properties": {
                    "i": {"type": "integer", "minimum": 0},
                    "j": {"type": "integer", "minimum": 0},
                    "coeffs": {"type": "array", "items": _RATIONAL},
                },
            },
        },
    },
}

REPRESENTATION_SCHEMA = {
    "type": "object",
    "required": ["algebra", "fiber_dim", "rho"],
    "properties": {
        "algebra": _REF,
        "fiber_dim": {"type": "integer", "minimum": 1},
        "rho": {"type": "array", "items": {"type": "array", "items": _RATIONAL}},
    },
}

SIMPLICIAL_SCHEMA = {
    "type": "object",
    "required": ["vertices", "maximal_simplices"],
    "properties": {
        "vertices": {"type": "integer", "minimum": 1},
        "maximal_simplices": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        },
    },
}

COVER_SCHEMA = {
    "type": "object",
    "required": ["nerve", "algebra"],
    "properties": {"nerve": _REF, "algebra": _REF, "rep": _REF},
}

CURVE_SCHEMA = {
    "type": "object",
    "required": ["kind", "data"],
    "properties": {
        "kind": {"enum": ["poly", "samples"]},
        "data": {"type": "array", "minItems": 1,
                 "items": {"type": "array", "items": {"type": ["string", "number"]}}},
    },
}

HOMOTOPY_SCHEMA = {
    "type": "object",
    "required": ["source", "target", "psi0", "curve"],
    "properties": {
        "source": _REF,
        "target": _REF,
        "psi0": _MATRIX,
        "curve": CURVE_SCHEMA,
        "steps": {"type": "integer", "minimum": 10},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "rep": _REF,
        "generator": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        "expect_failure": {"type": "boolean"},
        "constant_oracle": {"type": "boolean"},
        "exact": {"type": "boolean"},
    },
}

FLOWS_SCHEMA = {
    "type": "object",
    "required": ["checks"],
    "properties": {
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["type"],
                "properties": {"type": {"enum": ["derivation", "bracket", "semidirect"]}},
            },
        },
    },
}

CYLINDER_SCHEMA = {
    "type": "object",
    "required": ["algebra"],
    "properties": {
        "algebra": _REF,
        "rep": _REF,
        "seed": {"type": "integer"},
        "forms": {"type": "integer", "minimum": 1},
        "max_poly_degree": {"type": "integer", "minimum": 0},
        "t_values": {"type": "array", "items": _RATIONAL},
        "truncation": {"type": "integer", "minimum": 0},
    },
}


def validate(obj, schema: dict, where: str = "input") -> None:
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise SchemaError(f"{where}: field {path}: {e.message}") from None


def load_json(path) -> tuple[object, Path]:
    """Parse a JSON file; returns (object, directory for resolving references)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise SchemaError(f"{path}: cannot read file ({e.strerror})") from None
    try:
        return json.loads(text), path.parent
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None


def _resolve(ref, base: Path):
    """(object, base) for an inline object or a file reference."""
    if isinstance(ref, dict):
        return ref, base
    p = Path(ref)
    if not p.is_absolute():
        p = base / p
    if not p.exists() and (DATA_DIR / ref).exists():
        p = DATA_DIR / ref
    return load_json(p)


# -- algebras and representations ---------------------------------------------

def builtin_algebra(name: str) -> LieAlgebra | None:
    if name in BUILTIN_ALGEBRAS:
        return BUILTIN_ALGEBRAS[name]()
    m = re.fullmatch(r"abelian(\d+)", name)
    if m:
        return abelian(int(m.group(1)))
    return None


def parse_algebra(ref, base: Path = Path(".")) -> LieAlgebra:
    if isinstance(ref, str) and not ref.endswith(".json"):
        g = builtin_algebra(ref)
        if g is None:
            raise SchemaError(f"unknown builtin algebra {ref!r}")
        return g
    obj, _ = _resolve(ref, base)
    validate(obj, ALGEBRA_SCHEMA, "algebra")
    n = obj["dim"]
    brackets = {}
    for k, b in enumerate(obj["brackets"]):
        i, j, coeffs = b["i"], b["j"], b["coeffs"]
        if not (i < j < n):
            raise SchemaError(f"algebra: field brackets/{k}: need i < j < dim, got ({i}, {j})")
        if len(coeffs) != n:
            raise SchemaError(f"algebra: field brackets/{k}/coeffs: expected {n} entries")
        brackets[(i, j)] = {c: ql.to_q(x) for c, x in enumerate(coeffs) if ql.to_q(x) != 0}
    return lie_algebra(n, brackets, obj.get("name", "g"))


def dump_algebra(g: LieAlgebra) -> dict:
    out = []
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            if not ql.is_zero(g.structure[i, j]):
                out.append({"i": i, "j": j, "coeffs": [ql.format_q(x) for x in g.structure[i, j]]})
    return {"name": g.name, "dim": g.dim, "brackets": out}


def parse_representation(ref, base: Path = Path("."), algebra: LieAlgebra | None = None) -> Representation:
    """Representation from a file; flatness is not checked here.

    The special strings ``trivial`` and ``adjoint`` need ``algebra``.
    """
    if isinstance(ref, str) and ref in ("trivial", "adjoint"):
        if algebra is None:
            raise SchemaError(f"representation {ref!r} needs an algebra")
        return trivial_rep(algebra) if ref == "trivial" else adjoint_rep(algebra)
    obj, rbase = _resolve(ref, base)
    validate(obj, REPRESENTATION_SCHEMA, "representation")
    g = parse_algebra(obj["algebra"], rbase)
    if algebra is not None and not algebra.same_as(g):
        raise DimensionMismatch("representation is declared on a different algebra")
    m = obj["fiber_dim"]
    if len(obj["rho"]) != g.dim:
        raise DimensionMismatch(f"representation: expected {g.dim} matrices, got {len(obj['rho'])}")
    mats = []
    for k, flat in enumerate(obj["rho"]):
        if len(flat) != m * m:
            raise DimensionMismatch(f"representation: rho/{k} has {len(flat)} entries, fiber_dim^2 = {m * m}")
        mats.append(ql.qmatrix(flat, shape=(m, m)))
    return Representation(g, m, tuple(mats))


def dump_representation(r: Representation, algebra_ref=None) -> dict:
    return {
        "algebra": algebra_ref if algebra_ref is not None else dump_algebra(r.algebra),
        "fiber_dim": r.fiber_dim,
        "rho": [[ql.format_q(x) for x in m.flat] for m in r.rho],
    }


# -- nerves and covers -----------------------------------------------------------

_BUILTIN_NERVES = {"point": point, "circle": circle, "sphere": sphere}


def parse_simplicial(ref, base: Path = Path(".")) -> SimplicialComplex:
    if isinstance(ref, str) and ref in _BUILTIN_NERVES:
        return _BUILTIN_NERVES[ref]()
    obj, _ = _resolve(ref, base)
    validate(obj, SIMPLICIAL_SCHEMA, "simplicial complex")
    try:
        return SimplicialComplex(obj["vertices"], tuple(tuple(s) for s in obj["maximal_simplices"]))
    except ValueError as e:
        raise SchemaError(f"simplicial complex: {e}") from None


def parse_cover(ref, base: Path = Path(".")):
    """(nerve, algebra, representation or None)."""
    obj, cbase = _resolve(ref, base)
    validate(obj, COVER_SCHEMA, "cover")
    nerve = parse_simplicial(obj["nerve"], cbase)
    g = parse_algebra(obj["algebra"], cbase)
    r = parse_representation(obj["rep"], cbase, g) if "rep" in obj else None
    return nerve, g, r


# -- homotopies ------------------------------------------------------------------

def _curve_entry(x):
    return float(x) if isinstance(x, float) else ql.to_q(x)


def parse_homotopy(ref, base: Path = Path(".")) -> dict:
    from .homotopy_flows import Curve

    obj, hbase = _resolve(ref, base)
    validate(obj, HOMOTOPY_SCHEMA, "homotopy")
    g = parse_algebra(obj["source"], hbase)
    h = parse_algebra(obj["target"], hbase)
    psi0 = ql.qmatrix(obj["psi0"]) if obj["psi0"] else ql.qzeros(0, 0)
    if psi0.shape != (h.dim, g.dim):
        raise DimensionMismatch(f"homotopy: psi0 must be {h.dim} x {g.dim}, got {psi0.shape}")
    rows = [[_curve_entry(x) for x in r] for r in obj["curve"]["data"]]
    try:
        curve = Curve(h.dim, obj["curve"]["kind"], tuple(rows))
    except ValueError as e:
        raise SchemaError(f"homotopy: field curve: {e}") from None
    out = {
        "source": g,
        "target": h,
        "psi0": LieMorphism(g, h, psi0),
        "curve": curve,
        "steps": obj.get("steps"),
        "tol": obj.get("tol"),
        "rep": parse_representation(obj["rep"], hbase, h) if "rep" in obj else None,
        "generator": None,
        "expect_failure": obj.get("expect_failure", False),
        "constant_oracle": obj.get("constant_oracle", False),
        "exact": obj.get("exact", False),
    }
    if "generator" in obj:
        m = np.array(obj["generator"], dtype=float)
        if m.shape != (h.dim, h.dim):
            raise DimensionMismatch("homotopy: generator must be a square matrix on the target")
        out["generator"] = m
    return out


def parse_flows(ref, base: Path = Path(".")) -> tuple[dict, Path]:
    obj, fbase = _resolve(ref, base)
    validate(obj, FLOWS_SCHEMA, "flows")
    return obj, fbase


def parse_cylinder(ref, base: Path = Path(".")) -> dict:
    obj, cbase = _resolve(ref, base)
    validate(obj, CYLINDER_SCHEMA, "cylinder")
    g = parse_algebra(obj["algebra"], cbase)
    r = parse_representation(obj["rep"], cbase, g) if "rep" in obj else trivial_rep(g)
    return {
        "algebra": g,
        "rep": r,
        "seed": obj.get("seed", 0),
        "forms": obj.get("forms", 20),
        "max_poly_degree": obj.get("max_poly_degree", 3),
        "t_values": [ql.to_q(t) for t in obj.get("t_values", ["0", "1/2", "1"])],
        "truncation": obj.get("truncation", 2),
    }
