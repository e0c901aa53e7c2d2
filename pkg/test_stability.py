from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.glass_multistability.models import IndexSet, InvalidSetError, Verdict, WeightMatrix
from src.glass_multistability.network import GlassNetwork, embed_input, load_network
from src.glass_multistability.stability import (
    decomposed_verdict,
    enumerate_stable_sets,
    is_stable_set,
    minimally_stable_sets,
    multistability_degree,
    stable_sets_output_model,
)

NETWORKS = Path(__file__).parent / "networks"


@pytest.fixture
def example1():
    return load_network(NETWORKS / "example1.json")


@pytest.fixture
def example2():
    return load_network(NETWORKS / "example2.json")


def random_network(seed, n, embedded=False):
    rng = np.random.default_rng(seed)
    if embedded:
        return embed_input(rng.normal(size=(n - 1, n - 1)), rng.normal(size=n - 1), allow_violations=True)
    return GlassNetwork(WeightMatrix(rng.normal(size=(n, n))), allow_violations=True)


def test_first_example_has_one_stable_set(example1):
    stable = [r for r in enumerate_stable_sets(example1) if r.is_stable]
    assert len(stable) == 1
    assert stable[0].set.members == (1, 2)
    assert stable[0].attractor == (5.0, 5.0)
    assert stable[0].margin == 5.0
    assert multistability_degree(example1) == 1


def test_first_example_reports_the_origin_candidate(example1):
    reports = enumerate_stable_sets(example1)
    assert reports[0].set.is_empty()
    assert reports[0].verdict is Verdict.ORIGIN_CANDIDATE


def test_second_example_has_four_stable_sets(example2):
    reports = enumerate_stable_sets(example2)
    assert [r.set.members for r in reports] == [(3,), (1, 3), (2, 3), (1, 2, 3)]
    assert all(r.verdict is Verdict.STABLE for r in reports)
    assert [r.attractor for r in reports] == [
        (-1.0, -1.0, 1.0), (1.0, -1.0, 1.0), (-1.0, 1.0, 1.0), (1.0, 1.0, 1.0),
    ]


def test_negative_identity_only_has_the_origin_candidate():
    net = GlassNetwork(WeightMatrix(-np.eye(2)))
    reports = enumerate_stable_sets(net)
    assert [r.verdict for r in reports] == [Verdict.ORIGIN_CANDIDATE]
    assert multistability_degree(net) == 0


def test_unstable_sets_of_the_first_example(example1):
    report = is_stable_set(example1, IndexSet.parse(2, "1"))
    assert report.verdict is Verdict.UNSTABLE
    assert report.attractor == (1.0, 2.0)
    assert report.margin == -2.0


def test_include_all_reports_every_admissible_set(example2):
    assert len(enumerate_stable_sets(example2, include_all=True)) == 4
    assert len(enumerate_stable_sets(load_network(NETWORKS / "example1.json"), include_all=True)) == 4


def test_embedded_sets_must_contain_the_clamped_unit(example2):
    with pytest.raises(InvalidSetError):
        is_stable_set(example2, IndexSet.parse(3, "1,2"))
    with pytest.raises(InvalidSetError):
        is_stable_set(example2, IndexSet.empty(3))


def test_zero_component_outside_the_set_is_a_boundary_candidate():
    net = GlassNetwork(WeightMatrix(np.eye(2)))
    report = is_stable_set(net, IndexSet.parse(2, "1"))
    assert report.boundary_candidate
    assert report.verdict is Verdict.UNSTABLE


def test_minimally_stable_sets():
    net = GlassNetwork(WeightMatrix([[1.0, 1.0], [-1.0, 2.0]]))
    stable = [r.set.members for r in enumerate_stable_sets(net) if r.is_stable]
    assert stable == [(1,), (1, 2)]
    assert [a.members for a in minimally_stable_sets(net)] == [(1,)]


@pytest.mark.parametrize("seed", range(20))
def test_output_model_agrees_with_enumeration(seed):
    n = 2 + seed % 5
    net = random_network(seed, n, embedded=seed % 2 == 1)
    expected = [r.set for r in enumerate_stable_sets(net) if r.is_stable]
    assert stable_sets_output_model(net) == expected


def test_output_model_on_the_examples(example1, example2):
    assert [a.members for a in stable_sets_output_model(example1)] == [(1, 2)]
    assert [a.members for a in stable_sets_output_model(example2)] == [(3,), (1, 3), (2, 3), (1, 2, 3)]


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=2, max_value=6))
def test_two_block_form_matches_the_margin_test(seed, n):
    net = random_network(seed, n)
    for report in enumerate_stable_sets(net, include_all=True):
        if not report.set.is_empty():
            assert decomposed_verdict(net, report.set) == report.is_stable


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.sampled_from([0.25, 0.5, 2.0, 8.0]))
def test_verdicts_are_invariant_under_positive_scaling(seed, scale):
    net = random_network(seed, 4)
    scaled = GlassNetwork(WeightMatrix(net.w * scale), allow_violations=True)
    original = [(r.set, r.verdict) for r in enumerate_stable_sets(net, include_all=True)]
    rescaled = [(r.set, r.verdict) for r in enumerate_stable_sets(scaled, include_all=True)]
    assert original == rescaled
