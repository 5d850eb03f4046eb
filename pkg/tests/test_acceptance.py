"""Acceptance suite.

Each test covers one release criterion at its stated tolerance and prints a
PASS/FAIL line (run with -s or -rA to see them inline).
"""
import json
import math
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from krel.cli import main as cli_main
from krel.krein import classify, green_residual, krein_adjoint
from krel.model import (
    assemble,
    boundary_form_residual,
    desk_model,
    gram_at,
    inverse_quadratic_tail,
    model_weyl_evaluator,
    r_matrix,
    random_domain_samples,
    truncate,
)
from krel.relations import dissipative_class, mul
from krel.subspaces import containment_residual
from krel.verify import corpus
from krel.weyl import (
    cr_residual,
    defect_decomposition,
    gamma_restrict,
    mul_invariant,
    weyl_adjoint_three_ways,
    weyl_family,
)
from krel.krein import identity_pair

CORPUS_SEED = 20260810
GRID = (1j, -1j, 1 + 2j, 1 - 2j)
LEVELS = (50, 100, 200, 400)


@contextmanager
def criterion(number: int, description: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number}: FAIL - {description}")
        raise
    print(f"ACCEPTANCE {number}: PASS - {description}")


@pytest.fixture(scope="module")
def acceptance_corpus():
    return corpus(CORPUS_SEED, max_base_in=4, max_base_out=3, total=100)


@pytest.fixture(scope="module")
def desk_assemblies():
    return {level: assemble(truncate(desk_model(max(LEVELS)), level)) for level in LEVELS}


def test_criterion_1_three_route_agreement(acceptance_corpus):
    with criterion(1, "three adjoint routes agree pairwise below 1e-8 on 100 pairs"):
        start = time.perf_counter()
        worst = 0.0
        for entry in acceptance_corpus:
            for z in GRID:
                report = weyl_adjoint_three_ways(entry.pair, z)
                worst = max(worst, report.max_agreement_residual)
                assert report.max_agreement_residual < 1e-8, (entry.label, z)
        elapsed = time.perf_counter() - start
        assert elapsed < 30.0, f"runtime {elapsed:.1f}s exceeds 30s"
        print(f"  worst pairwise distance {worst:.3e}, runtime {elapsed:.1f}s")


def test_criterion_2_complement_decomposition(acceptance_corpus):
    with criterion(2, "eigen-graph complement decomposition and neutral-block containment"):
        worst_eq = worst_lemma = 0.0
        for entry in acceptance_corpus:
            for z in GRID:
                decomposition = defect_decomposition(entry.pair, z)
                worst_eq = max(worst_eq, decomposition.residual)
                assert decomposition.residual < 1e-8, (entry.label, z)
                assert decomposition.equals, (entry.label, z)
                restricted_adjoint = krein_adjoint(
                    gamma_restrict(entry.pair, z), entry.pair.spec
                )
                lemma = containment_residual(
                    decomposition.o_space, mul(restricted_adjoint)
                )
                worst_lemma = max(worst_lemma, lemma)
                assert lemma < 1e-8, (entry.label, z)
        print(f"  worst decomposition {worst_eq:.3e}, worst containment {worst_lemma:.3e}")


def test_criterion_3_shared_multivalued_invariant(acceptance_corpus):
    with criterion(3, "M(z) intersect M(z)* equals mul(gamma), including multivalued pairs"):
        multivalued = 0
        worst = 0.0
        for entry in acceptance_corpus:
            if entry.has_multivalued_part:
                multivalued += 1
            for z in GRID:
                residual = mul_invariant(entry.pair, z)
                worst = max(worst, residual)
                assert residual < 1e-8, (entry.label, z)
        assert multivalued >= 10, f"only {multivalued} pairs with nontrivial mul"
        print(f"  worst distance {worst:.3e}, {multivalued} multivalued pairs")


def test_criterion_4_nevanlinna_properties(acceptance_corpus):
    with criterion(4, "unitary pairs: dissipative, maximal by both criteria, adjoint symmetry"):
        unitary_count = 0
        for entry in acceptance_corpus:
            if not classify(entry.pair).unitary:
                continue
            unitary_count += 1
            for z in GRID:
                member = weyl_family(entry.pair, z)
                sign = "upper" if z.imag > 0 else "lower"
                report = dissipative_class(member, sign)
                assert report.min_eigenvalue >= -1e-10 * (
                    1.0 + abs(report.min_eigenvalue)
                ), (entry.label, z)
                assert report.dissipative and report.maximal, (entry.label, z)
                assert report.defect_range_full, (entry.label, z)
                three = weyl_adjoint_three_ways(entry.pair, z)
                assert three.symmetry_residual < 1e-8, (entry.label, z)
                restricted = gamma_restrict(entry.pair, z)
                basis = restricted.graph.basis
                n = entry.pair.spec.base_dim_in
                d = entry.pair.spec.base_dim_out
                for t in range(basis.shape[1]):
                    f = basis[:n, t]
                    h = basis[2 * n : 2 * n + d, t]
                    hp = basis[2 * n + d :, t]
                    defect = abs(np.imag(np.vdot(h, hp)) - z.imag * np.real(np.vdot(f, f)))
                    assert defect < 1e-10, (entry.label, z)
        assert unitary_count >= 20
        print(f"  verified {unitary_count} unitary pairs over {len(GRID)} points")


def test_criterion_5_analyticity_step_scaling():
    with criterion(5, "central-difference analyticity residual scales quadratically"):
        pair = identity_pair(1)

        def identity_resolvent(z: complex) -> np.ndarray:
            from krel.weyl import resolvent_matrix

            return resolvent_matrix(weyl_family(pair, z), 1j)

        coarse = cr_residual(identity_resolvent, 1 + 1j, 1e-3)
        fine = cr_residual(identity_resolvent, 1 + 1j, 5e-4)
        assert coarse / fine >= 3.0, (coarse, fine)

        evaluate = model_weyl_evaluator(desk_model(100))

        def model_resolvent(z: complex) -> np.ndarray:
            return np.linalg.inv(evaluate(z) + 1j * np.eye(1))

        coarse_m = cr_residual(model_resolvent, 1 + 1j, 1e-3)
        fine_m = cr_residual(model_resolvent, 1 + 1j, 5e-4)
        assert coarse_m / fine_m >= 3.0, (coarse_m, fine_m)
        print(
            f"  identity ratio {coarse / fine:.2f}, model ratio {coarse_m / fine_m:.2f}"
        )


def test_criterion_6_within_level_exactness(desk_assemblies):
    with criterion(6, "family member equals the response matrix at every level"):
        start = time.perf_counter()
        from krel.weyl import weyl_operator_matrix

        for level, assembly in desk_assemblies.items():
            matrix = weyl_operator_matrix(assembly.pair, 1j)
            gap = float(np.max(np.abs(matrix - r_matrix(assembly.model, 1j))))
            assert gap < 1e-7, (level, gap)
            green = green_residual(assembly.pair)
            assert green < 1e-8, (level, green)
        elapsed = time.perf_counter() - start
        assert elapsed < 20.0, f"runtime {elapsed:.1f}s exceeds 20s"
        print(f"  levels {list(desk_assemblies)} exact, runtime {elapsed:.1f}s")


def test_criterion_7_imaginary_part_identity(desk_assemblies):
    with criterion(7, "Im R equals (Im z) Gram(g(z)) with trivial kernel"):
        for level, assembly in desk_assemblies.items():
            model = assembly.model
            for z in (1j, 1 + 2j):
                r = r_matrix(model, z)
                imag_part = (r - r.conj().T) / 2j
                gap = float(np.max(np.abs(imag_part - z.imag * gram_at(model, z))))
                assert gap < 1e-12, (level, z, gap)
            smallest = float(
                np.linalg.eigvalsh(
                    (r_matrix(model, 1j) - r_matrix(model, 1j).conj().T) / 2j
                )[0]
            )
            assert smallest > 0.0, (level, smallest)
        print("  identity below 1e-12 at all levels, Im R(i) positive definite")


def test_criterion_8_boundary_form(desk_assemblies):
    with criterion(8, "boundary form identity under 1e-8 over 20 random samples"):
        assembly = desk_assemblies[200]
        samples = random_domain_samples(assembly, 20, seed=CORPUS_SEED)
        residual = boundary_form_residual(assembly, samples)
        assert residual < 1e-8, residual
        print(f"  residual {residual:.3e} over {len(samples)}^2 ordered pairs")


def test_criterion_9_convergence_and_tail_oracle():
    with criterion(9, "drift decreasing, sandwiched by the tail bound, limit matched"):
        model = desk_model(800)
        values = {
            level: r_matrix(truncate(model, level), 1j)[0, 0] for level in (50, 100, 200, 400, 800)
        }
        drifts = [abs(values[n] - values[2 * n]) for n in (50, 100, 200, 400)]
        assert all(a > b for a, b in zip(drifts, drifts[1:])), drifts
        for n, drift in zip((50, 100, 200, 400), drifts):
            tail_bound = 1.0 / n
            assert drift <= tail_bound, (n, drift)
            assert drift >= 1.0 / (4 * n), (n, drift)
            oracle = inverse_quadratic_tail(n) - inverse_quadratic_tail(2 * n)
            assert abs(drift - oracle) < 1e-12, (n, drift, oracle)
        target = (math.pi / math.tanh(math.pi) - 1.0) / 2.0
        block = float(np.imag(r_matrix(truncate(model, 400), 1j)[0, 0]))
        raw_gap = abs(block - target)
        assert raw_gap <= 2.0 / 400, raw_gap
        corrected = block + inverse_quadratic_tail(400)
        assert abs(corrected - target) < 1e-8, corrected - target
        print(
            f"  drifts {['%.2e' % d for d in drifts]}, raw gap {raw_gap:.3e}, "
            f"tail-corrected gap {abs(corrected - target):.3e}"
        )


def test_criterion_10_determinism(tmp_path: Path):
    with criterion(10, "verify-core output is byte identical for a fixed seed"):
        outputs = []
        for fmt, name in (("csv", "a.csv"), ("csv", "b.csv"), ("json", "a.json"), ("json", "b.json")):
            out = tmp_path / name
            code = cli_main(
                [
                    "verify-core",
                    "--seed",
                    "424242",
                    "--count",
                    "1",
                    "--max-dim",
                    "2",
                    "--format",
                    fmt,
                    "--out",
                    str(out),
                ]
            )
            assert code == 0
            text = out.read_text(encoding="utf-8")
            stripped = "\n".join(
                line
                for line in text.splitlines()
                if not line.startswith("# generated") and '"generated"' not in line
            )
            outputs.append((fmt, stripped))
        assert outputs[0][1] == outputs[1][1]
        assert outputs[2][1] == outputs[3][1]
        report = json.loads(Path(tmp_path / "a.json").read_text(encoding="utf-8"))
        assert report["checks_failed"] == 0
        print("  CSV and JSON reports byte identical modulo the timestamp line")
