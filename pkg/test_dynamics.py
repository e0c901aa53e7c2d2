import math
from pathlib import Path

import numpy as np
import pytest

from src.glass_multistability.dynamics import (
    heaviside,
    sample_trajectory,
    simulate,
    state_at,
    step_to_boundary,
    trajectory_final_state,
    vector_field_grid,
)
from src.glass_multistability.models import DimensionMismatchError, IndexSet, Termination, WeightMatrix
from src.glass_multistability.network import GlassNetwork, load_network
from src.glass_multistability.oracle import check_dynamics, random_network
from src.glass_multistability.stability import is_stable_set

NETWORKS = Path(__file__).parent / "networks"


@pytest.fixture
def example1():
    return load_network(NETWORKS / "example1.json")


@pytest.fixture
def example2():
    return load_network(NETWORKS / "example2.json")


def test_heaviside_is_zero_at_zero():
    assert heaviside([-1.0, 0.0, 2.0]).tolist() == [0.0, 0.0, 1.0]


def test_no_crossing_inside_a_stable_part(example1):
    assert step_to_boundary(example1.weights, IndexSet.full(2), [1.0, 1.0]) == (None, None)
    assert step_to_boundary(example1.weights, IndexSet.full(2), [5.0, 5.0]) == (None, None)


def test_crossing_time_from_below(example1):
    t, coordinate = step_to_boundary(example1.weights, IndexSet.parse(2, "1"), [1.0, -1.0])
    assert coordinate == 2
    assert t == pytest.approx(math.log(1.5), abs=1e-15)


def test_first_example_converges_to_its_attractor(example1):
    traj = simulate(example1, [0.1, 0.1])
    assert traj.termination is Termination.CONVERGED
    assert traj.converged_set.members == (1, 2)
    assert traj.final_state == (5.0, 5.0)
    assert not traj.boundary_fixed_point


def test_second_example_stays_in_its_part(example2):
    traj = simulate(example2, [0.5, -0.5, 1.0])
    assert traj.termination is Termination.CONVERGED
    assert traj.converged_set.members == (1, 3)
    assert traj.final_state == (1.0, -1.0, 1.0)
    assert traj.switches == 0


def test_starting_at_the_attractor_converges_immediately(example2):
    traj = simulate(example2, [1.0, 1.0, 1.0])
    assert traj.termination is Termination.CONVERGED
    assert len(traj.segments) == 1
    assert traj.segments[0].duration == 0.0


def test_switch_into_the_stable_part(example1):
    traj = simulate(example1, [1.0, -1.0])
    first = traj.segments[0]
    assert first.part.members == (1,)
    assert first.exit_coordinate == 2
    assert first.duration == pytest.approx(math.log(1.5), abs=1e-15)
    assert traj.segments[1].part.members == (1, 2)
    assert traj.segments[1].entry_state[1] == 0.0
    assert traj.converged_set.members == (1, 2)
    assert traj.switches == 1


def test_max_time_returns_the_exact_state(example1):
    traj = simulate(example1, [0.1, 0.1], max_time=0.1)
    assert traj.termination is Termination.MAX_TIME
    expected = 5.0 + (0.1 - 5.0) * math.exp(-0.1)
    assert traj.final_state[0] == pytest.approx(expected, abs=1e-12)
    assert traj.elapsed == 0.1


def test_sliding_boundary_is_reported_as_chatter():
    net = GlassNetwork(WeightMatrix([[-2.0, 1.0], [0.0, 1.0]]))
    traj = simulate(net, [1.0, 1.0])
    assert traj.termination is Termination.CHATTER
    assert traj.final_state[0] == 0.0


def test_switch_budget():
    net = GlassNetwork(WeightMatrix([[-2.0, 1.0], [0.0, 1.0]]))
    traj = simulate(net, [1.0, 1.0], max_switches=1)
    assert traj.termination is Termination.MAX_SWITCHES
    assert traj.switches == 1


def test_embedded_start_must_be_clamped(example2):
    with pytest.raises(ValueError):
        simulate(example2, [0.5, -0.5, 0.0])


def test_state_at_follows_the_exact_flow(example1):
    segment = simulate(example1, [0.1, 0.1]).segments[0]
    entry, target = np.array(segment.entry_state), np.array(segment.attractor)
    for t in np.linspace(0.0, segment.duration, 12)[1:-1]:
        assert np.allclose(state_at(segment, t), target + (entry - target) * np.exp(-t), rtol=0, atol=1e-12)


def test_sample_trajectory(example1):
    traj = simulate(example1, [0.1, 0.1])
    samples = sample_trajectory(traj, 0.5)
    assert samples[0].tolist() == [0.0, 0.1, 0.1]
    assert samples[-1].tolist() == [traj.elapsed, 5.0, 5.0]
    assert np.all(np.diff(samples[:, 0]) > 0)


def test_vector_field_of_the_first_example(example1):
    rows = vector_field_grid(example1, [(-1.0, 6.0, 8)])
    assert len(rows) == 64
    by_point = {(r["x"], r["y"]): (r["vx"], r["vy"]) for r in rows}
    assert by_point[(1.0, 1.0)] == (4.0, 4.0)
    assert by_point[(-1.0, -1.0)] == (1.0, 1.0)


def test_vector_field_on_the_input_hyperplane(example2):
    rows = vector_field_grid(example2, [(-1.0, 1.0, 3)])
    by_point = {(r["x"], r["y"]): (r["vx"], r["vy"]) for r in rows}
    assert by_point[(-1.0, -1.0)] == (0.0, 0.0)


def test_vector_field_needs_two_free_axes(example1):
    with pytest.raises(DimensionMismatchError):
        vector_field_grid(example1, [(-1.0, 1.0, 3)], fixed={1: 0.0})


def test_trajectories_end_at_enumerated_attractors():
    report = check_dynamics(n=5, trials=30, seed=3)
    assert report.checks > 0
    assert report.mismatches == []


def test_final_state_is_reproduced_from_the_segments(example1):
    converged = simulate(example1, [1.0, -1.0])
    assert np.allclose(trajectory_final_state(converged), converged.final_state, rtol=0, atol=1e-8)
    stopped = simulate(example1, [0.1, 0.1], max_time=0.1)
    assert np.allclose(trajectory_final_state(stopped), stopped.final_state, rtol=0, atol=1e-15)


def test_boundary_attractor_is_not_convergence():
    net = GlassNetwork(WeightMatrix([[1.0, 1.0], [0.0, 1.0]]))
    traj = simulate(net, [1.0, -1.0])
    assert traj.termination is Termination.MAX_TIME
    assert traj.converged_set is None
    assert traj.boundary_fixed_point
    assert traj.final_state[0] == 1.0
    assert abs(traj.final_state[1]) < 1e-20
    assert not is_stable_set(net, IndexSet.parse(2, "1")).is_stable


def test_all_negative_start_converges_to_the_origin(example1):
    traj = simulate(example1, [-1.0, -2.0])
    assert traj.termination is Termination.CONVERGED
    assert traj.converged_set.is_empty()
    assert traj.final_state == (0.0, 0.0)
    assert not traj.boundary_fixed_point


def merged_parts(segments):
    parts, durations = [], []
    for segment in segments:
        if parts and parts[-1] == segment.part.mask:
            durations[-1] += segment.duration
        else:
            parts.append(segment.part.mask)
            durations.append(segment.duration)
    return parts, durations


@pytest.mark.parametrize("seed", range(10))
def test_splitting_the_time_budget_gives_the_same_trajectory(seed):
    rng = np.random.default_rng(seed)
    horizon = 1.0
    compared = 0
    for _ in range(10):
        net = random_network(rng, 4)
        x0 = rng.normal(scale=3.0, size=net.n)
        whole = simulate(net, x0, max_time=horizon)
        if whole.termination is not Termination.MAX_TIME:
            continue
        first = simulate(net, x0, max_time=horizon / 2)
        assert first.termination is Termination.MAX_TIME
        second = simulate(net, first.final_state, max_time=horizon / 2)
        assert second.termination is Termination.MAX_TIME

        assert np.allclose(second.final_state, whole.final_state, rtol=0, atol=1e-9)
        parts, durations = merged_parts(first.segments + second.segments)
        whole_parts, whole_durations = merged_parts(whole.segments)
        assert parts == whole_parts
        assert np.allclose(durations, whole_durations, rtol=0, atol=1e-9)
        compared += 1
    assert compared > 0
