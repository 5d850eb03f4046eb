import json
from pathlib import Path

import numpy as np
import pytest

from krel.cli import main
from krel.krein import BoundaryPair, KreinSpec, identity_pair
from krel.model import desk_model
from krel.relations import graph_of_matrix
from krel.serialize import boundary_pair_to_json, model_to_json, render_json


def _strip_timestamps(text: str) -> str:
    lines = []
    for line in text.splitlines():
        if line.startswith("# generated") or '"generated"' in line:
            continue
        lines.append(line)
    return "\n".join(lines)


@pytest.fixture()
def identity_pair_file(tmp_path: Path) -> Path:
    path = tmp_path / "pair.json"
    path.write_text(render_json(boundary_pair_to_json(identity_pair(1))), encoding="utf-8")
    return path


@pytest.fixture()
def desk_model_file(tmp_path: Path) -> Path:
    path = tmp_path / "model.json"
    path.write_text(render_json(model_to_json(desk_model(60))), encoding="utf-8")
    return path


def test_verify_core_small_passes(tmp_path: Path, capsys):
    out = tmp_path / "report.json"
    code = main(["verify-core", "--seed", "1", "--count", "1", "--max-dim", "1",
                 "--format", "json", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["checks_failed"] == 0
    assert report["seed"] == 1


def test_verify_core_minimal_config_is_fast(tmp_path: Path):
    import time

    out = tmp_path / "tiny.json"
    start = time.perf_counter()
    code = main(["verify-core", "--seed", "12", "--count", "1", "--max-dim", "1",
                 "--format", "json", "--out", str(out)])
    elapsed = time.perf_counter() - start
    assert code == 0
    assert elapsed < 1.0


def test_tol_scale_env_var_mirrors_flag(tmp_path: Path):
    import os
    import subprocess
    import sys

    script = (
        "import krel.subspaces as s\n"
        "print(s.tol_scale())\n"
    )
    env = dict(os.environ, KREL_TOL_SCALE="3.5")
    result = subprocess.run(
        [sys.executable, "-c", script], env=env, capture_output=True, text=True
    )
    assert result.returncode == 0
    assert float(result.stdout.strip()) == 3.5


def test_verify_core_rejects_zero_count():
    with pytest.raises(SystemExit) as info:
        main(["verify-core", "--count", "0"])
    assert info.value.code == 2


def test_verify_core_perturbation_fails(tmp_path: Path):
    out = tmp_path / "report.json"
    code = main(["verify-core", "--seed", "1", "--count", "1", "--max-dim", "1",
                 "--perturb-gamma", "1e-3", "--format", "json", "--out", str(out)])
    assert code == 1
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["checks_failed"] > 0


def test_verify_core_deterministic_output(tmp_path: Path):
    outputs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        code = main(["verify-core", "--seed", "9", "--count", "1", "--max-dim", "2",
                     "--out", str(out)])
        assert code == 0
        outputs.append(_strip_timestamps(out.read_text(encoding="utf-8")))
    assert outputs[0] == outputs[1]


def test_weyl_identity_pair(tmp_path: Path, identity_pair_file: Path):
    out = tmp_path / "sweep.csv"
    code = main(["weyl", str(identity_pair_file), "--grid", "i", "--out", str(out)])
    assert code == 0
    lines = [l for l in out.read_text(encoding="utf-8").splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    assert header == ["re_z", "im_z", "dim_m", "dissipative", "maximal",
                      "symmetry_residual", "mul_residual", "cr_residual"]
    # Grid auto-closes under conjugation: two rows, conjugates adjacent.
    assert len(lines) == 3
    first = lines[1].split(",")
    second = lines[2].split(",")
    assert first[1] == "1" and second[1] == "-1"
    assert first[3] == "true" and second[3] == "true"
    assert float(first[5]) < 1e-10


def test_weyl_refuses_non_isometric(tmp_path: Path):
    pair = BoundaryPair(KreinSpec(1, 1), graph_of_matrix(2.0 * np.eye(2)))
    path = tmp_path / "bad.json"
    path.write_text(render_json(boundary_pair_to_json(pair)), encoding="utf-8")
    code = main(["weyl", str(path), "--grid", "i", "--out", str(tmp_path / "x.csv")])
    assert code == 1


def test_weyl_malformed_pair_file(tmp_path: Path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    code = main(["weyl", str(path), "--grid", "i", "--out", str(tmp_path / "o.csv")])
    assert code == 2
    missing = tmp_path / "missing.json"
    code = main(["weyl", str(missing), "--grid", "i", "--out", str(tmp_path / "o.csv")])
    assert code == 2


def test_weyl_empty_grid_is_usage_error(identity_pair_file: Path):
    with pytest.raises(SystemExit) as info:
        main(["weyl", str(identity_pair_file), "--grid", " "])
    assert info.value.code == 2


def test_weyl_real_axis_grid_rejected(identity_pair_file: Path):
    with pytest.raises(SystemExit) as info:
        main(["weyl", str(identity_pair_file), "--grid", "1.0"])
    assert info.value.code == 2


def test_weyl_rect_grid_orders_conjugates_adjacent(tmp_path: Path, identity_pair_file: Path):
    out = tmp_path / "sweep.csv"
    code = main(["weyl", str(identity_pair_file), "--grid", "rect:0:1:-1:1:1",
                 "--out", str(out)])
    assert code == 0
    rows = [l for l in out.read_text(encoding="utf-8").splitlines()
            if l and not l.startswith("#")][1:]
    assert len(rows) == 4
    points = [(float(r.split(",")[0]), float(r.split(",")[1])) for r in rows]
    assert points == [(0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0)]


def test_weyl_json_format(tmp_path: Path, identity_pair_file: Path):
    out = tmp_path / "sweep.json"
    code = main(["weyl", str(identity_pair_file), "--grid", "i", "--format", "json",
                 "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["unitary"] is True
    assert len(report["rows"]) == 2
    assert report["rows"][0]["dissipative"] is True


def test_model_converge_two_levels(tmp_path: Path, desk_model_file: Path):
    out = tmp_path / "table.csv"
    code = main(["model-converge", str(desk_model_file), "--levels", "30,60",
                 "--out", str(out)])
    assert code == 0
    text = out.read_text(encoding="utf-8")
    assert "surrogate" in text
    rows = [l for l in text.splitlines() if l and not l.startswith("#")][1:]
    # Two z points times two levels.
    assert len(rows) == 4
    for row in rows:
        cells = row.split(",")
        assert cells[-1] == "true"
        assert float(cells[3]) < 1e-8


def test_model_converge_single_level_has_no_drift(tmp_path: Path, desk_model_file: Path):
    out = tmp_path / "table.json"
    code = main(["model-converge", str(desk_model_file), "--levels", "40",
                 "--format", "json", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert len(report["rows"]) == 2
    assert all(row["r_drift"] is None for row in report["rows"])


def test_model_converge_spectrum_collision(tmp_path: Path, desk_model_file: Path, capsys):
    code = main(["model-converge", str(desk_model_file), "--levels", "30",
                 "--grid", "5", "--out", str(tmp_path / "z.csv")])
    assert code == 2
    assert "lambda_5" in capsys.readouterr().err


def test_model_converge_decreasing_levels_rejected(tmp_path: Path, desk_model_file: Path):
    code = main(["model-converge", str(desk_model_file), "--levels", "60,30",
                 "--out", str(tmp_path / "w.csv")])
    assert code == 2


def test_model_converge_deterministic(tmp_path: Path, desk_model_file: Path):
    outputs = []
    for name in ("r1.csv", "r2.csv"):
        out = tmp_path / name
        code = main(["model-converge", str(desk_model_file), "--levels", "30,60",
                     "--seed", "4", "--out", str(out)])
        assert code == 0
        outputs.append(_strip_timestamps(out.read_text(encoding="utf-8")))
    assert outputs[0] == outputs[1]
