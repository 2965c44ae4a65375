import json

import pytest

from algco import liealg as la
from algco import serialization as se
from algco.errors import SchemaError


@pytest.mark.parametrize("name", sorted(la.BUILTIN_ALGEBRAS))
def test_algebra_roundtrip(name):
    g = la.BUILTIN_ALGEBRAS[name]()
    assert se.parse_algebra(se.dump_algebra(g)).same_as(g)


def test_representation_roundtrip_and_specials():
    r = la.sl2_fundamental()
    back = se.parse_representation(json.loads(json.dumps(se.dump_representation(r))))
    assert back.same_as(r)
    g = la.heisenberg3()
    assert se.parse_representation("adjoint", algebra=g).same_as(la.adjoint_rep(g))
    assert se.parse_representation("trivial", algebra=g).same_as(la.trivial_rep(g))


def test_shipped_files_parse():
    for p in sorted(se.DATA_DIR.glob("*.json")):
        name = p.stem
        if name.startswith("homotopy_"):
            se.parse_homotopy(p)
        elif name.startswith("cover_"):
            se.parse_cover(p)
        elif name.startswith("cylinder_"):
            se.parse_cylinder(p)
        elif name == "flows":
            se.parse_flows(p)
        elif name in ("circle", "sphere", "point"):
            se.parse_simplicial(p)


def test_schema_errors_carry_field_paths(tmp_path):
    with pytest.raises(SchemaError, match="field brackets/0/j"):
        se.parse_algebra({"name": "x", "dim": 2, "brackets": [{"i": 0, "j": "1", "coeffs": ["0", "1"]}]})
    with pytest.raises(SchemaError, match="unknown builtin"):
        se.parse_algebra("gl7")
    p = tmp_path / "a.json"
    p.write_text("{\"name\": \"x\",\n \"dim\": 2,,}")
    with pytest.raises(SchemaError, match="line 2"):
        se.parse_algebra(str(p))
