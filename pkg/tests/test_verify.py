import numpy as np
import pytest

from krel.krein import green_residual
from krel.verify import STANDARD_GRID, check_pair, corpus, run_verification


def test_corpus_is_deterministic():
    first = corpus(5, max_base_in=2, max_base_out=2, total=8)
    second = corpus(5, max_base_in=2, max_base_out=2, total=8)
    assert [e.label for e in first] == [e.label for e in second]
    for a, b in zip(first, second):
        assert np.array_equal(a.pair.gamma.graph.basis, b.pair.gamma.graph.basis)


def test_corpus_covers_kinds_and_multivalued_pairs():
    entries = corpus(7, max_base_in=3, max_base_out=3, total=36)
    kinds = {e.kind.split("(")[0] for e in entries}
    assert {"isometric", "unitary", "unitary+mul"} <= kinds
    assert sum(1 for e in entries if e.has_multivalued_part) >= 4
    for entry in entries:
        assert green_residual(entry.pair) < 1e-10


def test_check_pair_all_green_on_unitary():
    entries = corpus(11, max_base_in=2, max_base_out=2, total=6)
    for entry in entries:
        results = check_pair(entry.label, entry.pair, grid=STANDARD_GRID)
        bad = [r for r in results if not r.passed]
        assert not bad, bad[:3]


def test_run_verification_perturbation_detected():
    report = run_verification(seed=2, count=1, max_dim=1, perturb=1e-3)
    assert not report.ok
    assert any(r.check == "green_identity" for r in report.failures)


def test_run_verification_bounds():
    with pytest.raises(ValueError):
        run_verification(seed=1, count=0, max_dim=2)
    with pytest.raises(ValueError):
        run_verification(seed=1, count=1, max_dim=7)
