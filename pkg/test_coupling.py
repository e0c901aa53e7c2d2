import numpy as np
import pytest

from src.glass_multistability.coupling import (
    compose_check,
    coupling_check,
    decompose_check,
    is_block_diag_dominant,
    is_block_Z,
    triple_coupling_check,
)
from src.glass_multistability.models import IndexSet, InvalidSetError, NotStableError, WeightMatrix
from src.glass_multistability.network import GlassNetwork
from src.glass_multistability.oracle import check_theorems


def s(text, n=2):
    return IndexSet.parse(n, text)


def net(rows):
    return GlassNetwork(WeightMatrix(rows))


def test_block_diagonal_dominance():
    assert is_block_diag_dominant(WeightMatrix([[2, -1], [-1, 2]]), s("1"), s("1,2"))
    assert not is_block_diag_dominant(WeightMatrix([[1, -4], [-1, 2]]), s("1"), s("1,2"))


def test_block_z_matrix():
    assert is_block_Z(WeightMatrix([[2, -1], [-1, 2]]), s("1"), s("1,2"))
    assert not is_block_Z(WeightMatrix([[2, 1], [1, 2]]), s("1"), s("1,2"))


def test_ties_are_not_dominant():
    assert not is_block_diag_dominant(np.array([[1.0, -1.0], [-1.0, 2.0]]), s("1"), s("1,2"))


def test_block_predicates_need_a_subset():
    with pytest.raises(InvalidSetError):
        is_block_Z(WeightMatrix([[2, -1], [-1, 2]]), s("1,2"), s("1"))


def test_compose_dominant_sets():
    verdict = compose_check(net([[2, -1], [-1, 2]]), s("1"), s("2"))
    assert verdict.holds and verdict.recomputed
    assert verdict.witness is None


def test_compose_fails_without_dominance():
    verdict = compose_check(net([[1, -4], [-4, 1]]), s("1"), s("2"))
    assert not verdict.holds and not verdict.recomputed
    assert verdict.witness.index == 1
    assert verdict.witness.values == (1.0, -4.0)


def test_compose_rejects_empty_and_overlapping_sets():
    w = net([[2, -1], [-1, 2]])
    with pytest.raises(InvalidSetError):
        compose_check(w, s(""), s(""))
    with pytest.raises(InvalidSetError):
        compose_check(w, s("1"), s("1"))


def test_decompose_into_stable_parts():
    verdict = decompose_check(net([[2, -1], [-1, 2]]), s("1,2"), s("1"))
    assert verdict.holds and verdict.recomputed


def test_decompose_without_block_z_structure():
    verdict = decompose_check(net([[2, 1], [1, 2]]), s("1,2"), s("1"))
    assert not verdict.holds and not verdict.recomputed


def test_decompose_needs_a_proper_subset():
    with pytest.raises(InvalidSetError):
        decompose_check(net([[2, -1], [-1, 2]]), s("1,2"), s("1,2"))


def test_coupling_with_itself_holds():
    verdict = coupling_check(net([[2, -1], [-1, 2]]), s("1"), s("1"))
    assert verdict.holds


def test_coupling_detects_stable_partner():
    assert coupling_check(net([[2, -1], [-1, 2]]), s("1"), s("2")).holds


def test_coupling_reports_a_witness_for_an_unstable_partner():
    verdict = coupling_check(net([[2, 1], [-1, 2]]), s("1"), s("2"))
    assert not verdict.holds
    assert verdict.witness.index == 1
    assert verdict.witness.values == (2.0, -1.0)


def test_coupling_needs_a_stable_reference():
    with pytest.raises(NotStableError):
        coupling_check(net([[2, 1], [-1, 2]]), s("2"), s("1"))


def test_triple_coupling():
    verdict = triple_coupling_check(net([[2, -1], [-1, 2]]), s("1"), s("2"), s("1,2"))
    assert verdict.holds and verdict.recomputed


def test_theorems_agree_with_direct_stability_on_random_networks():
    report = check_theorems(n=6, trials=60, seed=11)
    assert report.checks > 0
    assert report.mismatches == []
