from pathlib import Path

import numpy as np
import pytest

from src.glass_multistability.factorization import (
    eigen_check,
    factorize,
    factorize_blocks,
    reconstruct,
    verify_blocks,
    verify_factorization,
)
from src.glass_multistability.models import Factorization, IndexSet, NotStableError, WeightMatrix
from src.glass_multistability.network import GlassNetwork, load_network
from src.glass_multistability.stability import enumerate_stable_sets, is_stable_set

NETWORKS = Path(__file__).parent / "networks"


@pytest.fixture
def example2():
    return load_network(NETWORKS / "example2.json")


def test_golden_factorization_of_the_embedded_example(example2):
    f = factorize(example2, IndexSet.full(3), epsilon=0.5)
    assert f.epsilon == 0.5
    assert np.allclose(f.x, 0.5 * np.array([[3, 2, 2], [2, 3, 2], [2, 2, 3]]), atol=1e-12)
    assert np.allclose(f.y, 0.5 * np.array([[4, 2, 1], [2, 4, 1], [2, 2, 3]]), atol=1e-12)
    assert np.allclose(f.x_inverse_code, np.full(3, 2 / 7), atol=1e-12)
    assert np.allclose(f.y @ np.linalg.inv(f.x), example2.w, atol=1e-12)
    check = verify_factorization(f, example2)
    assert check.ok, check.violations
    assert check.residual < 1e-12


def test_scalar_factorization():
    net = GlassNetwork(WeightMatrix([[2.0]]))
    f = factorize(net, IndexSet.full(1), epsilon=1.0)
    assert f.x.tolist() == [[2.0]]
    assert f.y.tolist() == [[4.0]]
    assert np.allclose(reconstruct(f), [[2.0]])


def test_epsilon_is_halved_until_y_is_positive():
    net = GlassNetwork(WeightMatrix([[3.0, -2.0], [-2.0, 3.0]]))
    f = factorize(net, IndexSet.full(2), epsilon=0.5)
    assert f.epsilon == 0.25
    assert np.all(f.y > 0)
    assert verify_factorization(f, net).ok


def test_unstable_sets_have_no_factorization():
    net = load_network(NETWORKS / "example1.json")
    with pytest.raises(NotStableError):
        factorize(net, IndexSet.parse(2, "1"))


def test_negated_y_entry_is_a_violation(example2):
    f = factorize(example2, IndexSet.full(3), epsilon=0.5)
    y = f.y.copy()
    y[0, 0] = -y[0, 0]
    check = verify_factorization(Factorization(f.x, y, f.epsilon, f.target_set), example2)
    assert not check.ok
    assert "Y not positive" in check.violations


def test_perturbed_reconstruction_is_a_violation(example2):
    f = factorize(example2, IndexSet.full(3), epsilon=0.5)
    check = verify_factorization(Factorization(f.x, f.y + 1e-6, f.epsilon, f.target_set), example2)
    assert not check.ok
    assert any("reconstruction tolerance" in v for v in check.violations)


def test_blocks_of_the_full_set_omit_the_outer_block(example2):
    blocks = factorize_blocks(example2, IndexSet.full(3), epsilon=0.5)
    assert blocks.outer is None
    assert blocks.outer_omitted
    assert verify_blocks(blocks).ok


def test_blocks_with_a_complement(example2):
    blocks = factorize_blocks(example2, IndexSet.parse(3, "1,3"), epsilon=0.5)
    assert blocks.inner.rows.members == (1, 3)
    assert np.all(blocks.inner.y > 0)
    assert blocks.outer.rows.members == (2,)
    assert np.allclose(blocks.outer.y, [[-1.0, -1.5]])
    assert verify_blocks(blocks).ok


def test_blocks_of_the_first_example():
    net = load_network(NETWORKS / "example1.json")
    blocks = factorize_blocks(net, IndexSet.full(2), epsilon=0.5)
    assert np.allclose(blocks.inner.y, np.array([[5.5, 7.0], [6.0, 6.5]]))
    assert blocks.outer is None


def test_eigenstructure_of_x(example2):
    f = factorize(example2, IndexSet.parse(3, "1,3"), epsilon=0.5)
    residuals = eigen_check(f)
    assert residuals["code"] < 1e-12
    assert residuals["orthogonal"] < 1e-12


@pytest.mark.parametrize("seed", range(30))
def test_factorization_exists_exactly_for_stable_sets(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    net = GlassNetwork(WeightMatrix(rng.normal(size=(n, n))), allow_violations=True)
    for report in enumerate_stable_sets(net, include_all=True):
        if report.set.is_empty():
            continue
        if report.is_stable:
            f = factorize(net, report.set)
            assert verify_factorization(f, net).ok
        else:
            with pytest.raises(NotStableError):
                factorize(net, report.set)
