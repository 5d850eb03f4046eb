import json

import numpy as np
import pytest

from krel.krein import KreinSpec, random_unitary
from krel.model import desk_model
from krel.relations import make_relation, relations_equal
from krel.serialize import (
    boundary_pair_from_json,
    boundary_pair_to_json,
    complex_from_json,
    complex_to_json,
    format_number,
    matrix_from_json,
    matrix_to_json,
    model_from_json,
    model_to_json,
    relation_from_json,
    relation_to_json,
    render_csv,
    render_json,
)
from krel.subspaces import compare


def test_complex_wire_format():
    assert complex_to_json(1 - 2j) == [1.0, -2.0]
    assert complex_from_json([1.0, -2.0]) == 1 - 2j
    assert complex_from_json(3) == 3 + 0j


def test_matrix_row_major_roundtrip():
    mat = np.array([[1 + 1j, 2.0], [0.0, -3j]])
    data = matrix_to_json(mat)
    assert data[0][1] == [2.0, 0.0]
    assert np.array_equal(matrix_from_json(data), mat)


def test_relation_roundtrip():
    rel = make_relation(2, 1, [((1, 0), (2,)), ((0, 1j), (1,))])
    data = relation_to_json(rel)
    assert data["in_dim"] == 2 and data["out_dim"] == 1
    back = relation_from_json(json.loads(json.dumps(data)))
    assert relations_equal(back, rel)


def test_zero_relation_roundtrip():
    from krel.relations import zero_relation

    rel = zero_relation(2, 3)
    back = relation_from_json(json.loads(json.dumps(relation_to_json(rel))))
    assert relations_equal(back, rel)


def test_boundary_pair_roundtrip():
    pair = random_unitary(KreinSpec(2, 2), seed=5)
    data = boundary_pair_to_json(pair)
    back = boundary_pair_from_json(json.loads(json.dumps(data)))
    assert back.spec == pair.spec
    assert compare(back.gamma.graph, pair.gamma.graph).equals


def test_model_roundtrip_and_rules():
    model = desk_model(12)
    back = model_from_json(json.loads(json.dumps(model_to_json(model))))
    assert back.level == 12
    assert np.array_equal(back.eigenvalues, model.eigenvalues)
    assert back.points == model.points

    ruled = model_from_json({"N": 8, "d": 1, "eigenvalue_rule": "linear", "phi_profile": "constant"})
    assert ruled.level == 8
    assert np.array_equal(ruled.eigenvalues, np.arange(1.0, 9.0))
    assert np.all(ruled.phi == 1.0)
    with pytest.raises(ValueError):
        model_from_json({"N": 8, "eigenvalue_rule": "geometric"})


def test_weyl_report_roundtrips_as_json():
    from krel.serialize import weyl_report_to_json
    from krel.weyl import weyl_adjoint_three_ways
    from krel.krein import identity_pair

    report = weyl_adjoint_three_ways(identity_pair(1), 1j)
    data = json.loads(json.dumps(weyl_report_to_json(report)))
    assert data["z"] == [0.0, 1.0]
    assert data["diagnostics"]["dissipative"] is True
    back = relation_from_json(data["m"])
    assert relations_equal(back, report.m)


def test_format_number_roundtrips():
    for value in (1 / 3, 1e-17, 123456.789, float(np.pi)):
        assert float(format_number(value)) == value


def test_render_csv_shapes():
    text = render_csv(
        ["a", "b", "flag"],
        [(1, 0.5, True), (2, float("nan"), False)],
        header_comments=["hello"],
    )
    lines = text.strip().split("\n")
    assert lines[0] == "# hello"
    assert lines[1] == "a,b,flag"
    assert lines[2] == "1,0.5,true"
    assert lines[3].startswith("2,nan,false")


def test_render_json_scrubs_nan():
    payload = {"x": float("nan"), "rows": [{"y": 1.0}]}
    decoded = json.loads(render_json(payload))
    assert decoded["x"] is None
    assert decoded["rows"][0]["y"] == 1.0
