"""JSON and CSV wire formats.

Complex numbers serialize as two-element arrays [re, im]; vectors as lists
of those pairs; matrices as nested row-major lists.  Relations serialize as
{in_dim, out_dim, pairs} where each pair is [input vector, output vector]
read from the stored graph basis.  CSV numbers are printed with 17
significant digits so parsed doubles round-trip exactly.
"""
from __future__ import annotations

import json
import math
from typing import Any, Sequence

import numpy as np

from .krein import BoundaryPair, KreinSpec
from .model import SpectralModel
from .relations import LinearRelation, make_relation
from .subspaces import as_complex_matrix
from .weyl import WeylReport

__all__ = [
    "boundary_pair_from_json",
    "boundary_pair_to_json",
    "complex_from_json",
    "complex_to_json",
    "format_number",
    "matrix_from_json",
    "matrix_to_json",
    "model_from_json",
    "model_to_json",
    "relation_from_json",
    "relation_to_json",
    "render_csv",
    "render_json",
    "vector_from_json",
    "vector_to_json",
    "weyl_report_to_json",
]


def format_number(value: float) -> str:
    return format(float(value), ".17g")


def _require(data, key: str):
    try:
        return data[key]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"missing required field {key!r}") from exc


def complex_to_json(value: complex) -> list[float]:
    value = complex(value)
    return [value.real, value.imag]


def complex_from_json(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    re, im = value
    return complex(float(re), float(im))


def vector_to_json(vector) -> list[list[float]]:
    return [complex_to_json(v) for v in np.asarray(vector, dtype=np.complex128).reshape(-1)]


def vector_from_json(data) -> np.ndarray:
    return np.array([complex_from_json(v) for v in data], dtype=np.complex128)


def matrix_to_json(matrix) -> list[list[list[float]]]:
    mat = as_complex_matrix(matrix)
    return [[complex_to_json(v) for v in row] for row in mat]


def matrix_from_json(data) -> np.ndarray:
    return np.array([[complex_from_json(v) for v in row] for row in data], dtype=np.complex128)


def relation_to_json(rel: LinearRelation) -> dict[str, Any]:
    pairs = [
        [
            vector_to_json(rel.input_block[:, t]),
            vector_to_json(rel.output_block[:, t]),
        ]
        for t in range(rel.graph_dim)
    ]
    return {"in_dim": rel.in_dim, "out_dim": rel.out_dim, "pairs": pairs}


def relation_from_json(data) -> LinearRelation:
    pairs = [
        (vector_from_json(item[0]), vector_from_json(item[1])) for item in data.get("pairs", [])
    ]
    return make_relation(int(_require(data, "in_dim")), int(_require(data, "out_dim")), pairs)


def boundary_pair_to_json(pair: BoundaryPair) -> dict[str, Any]:
    return {
        "base_dim_in": pair.spec.base_dim_in,
        "base_dim_out": pair.spec.base_dim_out,
        "gamma": relation_to_json(pair.gamma),
    }


def boundary_pair_from_json(data) -> BoundaryPair:
    spec = KreinSpec(int(_require(data, "base_dim_in")), int(_require(data, "base_dim_out")))
    return BoundaryPair(spec, relation_from_json(_require(data, "gamma")))


def weyl_report_to_json(report: WeylReport) -> dict[str, Any]:
    return {
        "z": complex_to_json(report.z),
        "m": relation_to_json(report.m),
        "adj_direct": relation_to_json(report.adj_direct),
        "adj_kernel": relation_to_json(report.adj_kernel),
        "adj_theorem": relation_to_json(report.adj_theorem),
        "diagnostics": {
            "dissipative": report.dissipative,
            "maximal": report.maximal,
            "mul_invariant_residual": report.mul_invariant_residual,
            "symmetry_residual": report.symmetry_residual,
            "agreement_residuals": dict(report.agreement_residuals),
        },
    }


def model_to_json(model: SpectralModel) -> dict[str, Any]:
    return {
        "N": model.level,
        "eigenvalues": [float(v) for v in model.eigenvalues],
        "phi": matrix_to_json(model.phi),
        "d": model.defect,
        "points": [complex_to_json(z) for z in model.points],
        "offset_E": matrix_to_json(model.offset),
        "probe_z": complex_to_json(model.probe),
    }


def model_from_json(data) -> SpectralModel:
    """Build a model from explicit arrays or from named rules.

    ``eigenvalue_rule: "linear"`` means lambda_n = n up to level N;
    ``phi_profile: "constant"`` means unit components for every functional.
    Explicit ``eigenvalues``/``phi`` arrays take precedence.
    """
    level = int(_require(data, "N"))
    d = int(data.get("d", 1))
    points = tuple(complex_from_json(z) for z in data.get("points", [[0.0, 1.0], [0.0, 2.0]]))
    probe = complex_from_json(data.get("probe_z", [1.0, 2.0]))
    offset = (
        matrix_from_json(data["offset_E"])
        if "offset_E" in data
        else np.zeros((d, d), dtype=np.complex128)
    )
    if "eigenvalues" in data:
        eigenvalues = np.asarray([float(v) for v in data["eigenvalues"]], dtype=np.float64)
        if eigenvalues.size != level:
            raise ValueError("eigenvalue list length disagrees with N")
    else:
        rule = data.get("eigenvalue_rule", "linear")
        if rule != "linear":
            raise ValueError(f"unknown eigenvalue_rule {rule!r}")
        eigenvalues = np.arange(1, level + 1, dtype=np.float64)
    if "phi" in data:
        phi = matrix_from_json(data["phi"])
    else:
        profile = data.get("phi_profile", "constant")
        if profile != "constant":
            raise ValueError(f"unknown phi_profile {profile!r}")
        phi = np.ones((d, level), dtype=np.complex128)
    return SpectralModel(eigenvalues, phi, points, offset, probe)


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_number(float(value))
    return str(value)


def render_csv(columns: Sequence[str], rows: Sequence[Sequence], header_comments: Sequence[str] = ()) -> str:
    lines = [f"# {comment}" for comment in header_comments]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _json_default(value):
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot serialize {type(value)!r}")


def _scrub_nan(value):
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, dict):
        return {k: _scrub_nan(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_scrub_nan(v) for v in value]
    return value


def render_json(payload) -> str:
    return json.dumps(_scrub_nan(payload), indent=2, default=_json_default) + "\n"
