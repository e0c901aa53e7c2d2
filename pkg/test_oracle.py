import numpy as np
import pytest

from src.glass_multistability.models import CountMode, FamilyKind
from src.glass_multistability.oracle import (
    check_counts,
    check_equivalence,
    random_family,
    run_oracle,
)
from src.glass_multistability.reporting import oracle_report_to_dict
from src.glass_multistability.signs import validate_family


def test_counts_match_in_unconstrained_and_vanishing_modes():
    report = check_counts(5, 10, seed=7, modes=[CountMode.UNCONSTRAINED, CountMode.VANISHING_INPUT])
    assert report.passed, report.mismatches
    assert report.diagnostics == []
    assert report.sections["counts/unconstrained"] > 0


def test_embedded_nested_disagreements_are_diagnostics_not_failures():
    report = check_counts(4, 20, seed=7, modes=[CountMode.NONVANISHING_INPUT])
    assert report.passed, report.mismatches
    assert report.diagnostics
    assert all(d["family"].startswith("nested:") for d in report.diagnostics)


def test_equivalence_scope():
    report = check_equivalence(5, 10, seed=7)
    assert report.passed, report.mismatches
    assert report.checks == 12


@pytest.mark.parametrize("kind", list(FamilyKind))
def test_random_families_are_well_formed(kind):
    rng = np.random.default_rng(0)
    for n in range(1, 7):
        for _ in range(20):
            validate_family(random_family(rng, kind, n))


def test_reports_are_deterministic_for_a_seed():
    first = oracle_report_to_dict(run_oracle("all", 3, 3, seed=5))
    second = oracle_report_to_dict(run_oracle("all", 3, 3, seed=5))
    assert first == second
    assert first["passed"]
    assert set(first["sections"]) >= {"equivalence", "counts/unconstrained"}


def test_unknown_scope_is_rejected():
    with pytest.raises(ValueError):
        run_oracle("everything", 3, 3)
