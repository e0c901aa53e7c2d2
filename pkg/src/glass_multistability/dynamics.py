# glass_multistability/dynamics.py

"""
Event-driven simulation of dx/dt = -x + W theta(x).

Inside a part the flow is x(t) = W_a + (x(0) - W_a) e^-t, a straight line
towards the attractor point, so no integrator is needed: the simulator jumps
from one zero-crossing to the next in closed form. A coordinate crossing zero
from above becomes inactive (theta(0) = 0); one crossing from below becomes
active. Membership is carried explicitly because theta alone cannot tell the
two apart at x_i = 0.
"""

import math
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .config import get_setting
from .core import code_vector
from .logging_utils import log_event, log_warning
from .models import (
    DimensionMismatchError,
    IndexSet,
    NumericalFailureError,
    Termination,
    Trajectory,
    TrajectorySegment,
    Verdict,
    WeightMatrix,
)
from .network import GlassNetwork
from .stability import is_stable_set

# Crossing times closer than this are treated as simultaneous.
_TIE_WINDOW = 1e-15

Vector = Union[Sequence[float], np.ndarray]


def heaviside(x: Vector) -> np.ndarray:
    """theta(x) with theta(0) = 0."""
    return (np.asarray(x, dtype=float) > 0.0).astype(float)


def _crossing_times(attractor: np.ndarray, part: IndexSet, x: np.ndarray) -> np.ndarray:
    """Per-coordinate time until x_i reaches zero and changes side; inf when it never does."""
    active = code_vector(part) > 0.0
    times = np.full(x.shape[0], np.inf)

    leaving = active & (attractor < 0.0)
    entering = ~active & (attractor > 0.0)
    moving = (leaving & (x > 0.0)) | (entering & (x < 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        times[moving] = np.log1p(-x[moving] / attractor[moving])
    times[(leaving | entering) & (x == 0.0)] = 0.0
    return times


def step_to_boundary(w: Union[WeightMatrix, np.ndarray], part: IndexSet,
                     x0: Vector) -> Tuple[Optional[float], Optional[int]]:
    """
    Time and 1-based coordinate of the first zero-crossing from x0 within
    `part`, lowest index on ties; (None, None) when the flow reaches the
    attractor without leaving the part.
    """
    matrix = w.w if isinstance(w, WeightMatrix) else np.asarray(w, dtype=float)
    x = np.asarray(x0, dtype=float)
    times = _crossing_times(matrix @ code_vector(part), part, x)
    if not np.any(np.isfinite(times)):
        return None, None
    first = float(np.min(times))
    coordinate = int(np.flatnonzero(times <= first + _TIE_WINDOW)[0])
    return first, coordinate + 1


def _advance(x: np.ndarray, attractor: np.ndarray, t: float) -> np.ndarray:
    return x - (attractor - x) * math.expm1(-t)


def state_at(segment: TrajectorySegment, t: float) -> np.ndarray:
    """Exact state t time units after the segment began."""
    if t < 0 or t > segment.duration:
        raise ValueError(f"Time {t} outside the segment [0, {segment.duration}]")
    return _advance(np.array(segment.entry_state), np.array(segment.attractor), t)


def _check_initial_state(net: GlassNetwork, x0: Vector) -> np.ndarray:
    x = np.asarray(x0, dtype=float)
    if x.shape != (net.n,):
        raise DimensionMismatchError(f"Initial state has shape {x.shape}, expected ({net.n},)")
    if not np.all(np.isfinite(x)):
        raise NumericalFailureError("Initial state contains non-finite values")
    if net.clamped_unit is not None and x[-1] != 1.0:
        raise ValueError("With embedded input the clamped coordinate must start at 1")
    return x


def _is_chatter(switch_log: List[Tuple[float, np.ndarray]]) -> bool:
    count = get_setting("chatter_switches")
    if len(switch_log) < count:
        return False
    recent = switch_log[-count:]
    if recent[-1][0] - recent[0][0] >= get_setting("chatter_time"):
        return False
    anchor = recent[0][1]
    return all(float(np.max(np.abs(state - anchor))) < get_setting("convergence_tolerance") for _, state in recent)


def simulate(net: GlassNetwork, x0: Vector, max_time: float = 50.0, max_switches: int = 10000) -> Trajectory:
    """Follow the exact piecewise flow until convergence, the time or switch budget, or chatter."""
    if not max_time > 0:
        raise ValueError(f"max_time must be positive, got {max_time}")
    if max_switches < 1:
        raise ValueError(f"max_switches must be positive, got {max_switches}")
    x = _check_initial_state(net, x0)
    tolerance = get_setting("convergence_tolerance")

    mask = sum(1 << int(i) for i in np.flatnonzero(x > 0.0))
    part = IndexSet(net.n, mask)
    segments: List[TrajectorySegment] = []
    switch_log: List[Tuple[float, np.ndarray]] = []
    elapsed = 0.0

    while True:
        attractor = net.w @ code_vector(part)
        times = _crossing_times(attractor, part, x)
        remaining = max_time - elapsed

        if not np.any(np.isfinite(times)):
            if is_stable_set(net, part).verdict is Verdict.UNSTABLE:
                # No crossing left, yet the attractor lies on the boundary of the part.
                log_warning("Dynamics", "BoundaryFixedPoint",
                            f"Trajectory approaches a boundary point of {part} that is not a stable fixed point",
                            {"attractor": attractor.tolist()})
                segments.append(TrajectorySegment(part, tuple(x), tuple(attractor), remaining))
                final = _advance(x, attractor, remaining)
                return Trajectory(segments, Termination.MAX_TIME, tuple(final), max_time, boundary_fixed_point=True)

            distance = float(np.max(np.abs(x - attractor)))
            settle = math.log(distance / tolerance) if distance > tolerance else 0.0
            if settle <= remaining:
                segments.append(TrajectorySegment(part, tuple(x), tuple(attractor), settle))
                log_event("Dynamics", f"Converged to the attractor of {part}",
                          {"time": elapsed + settle, "switches": len(switch_log)})
                return Trajectory(segments, Termination.CONVERGED, tuple(attractor), elapsed + settle, part)
            segments.append(TrajectorySegment(part, tuple(x), tuple(attractor), remaining))
            final = _advance(x, attractor, remaining)
            return Trajectory(segments, Termination.MAX_TIME, tuple(final), max_time)

        first = float(np.min(times))
        if first > remaining:
            segments.append(TrajectorySegment(part, tuple(x), tuple(attractor), remaining))
            final = _advance(x, attractor, remaining)
            return Trajectory(segments, Termination.MAX_TIME, tuple(final), max_time)
        if len(switch_log) >= max_switches:
            return Trajectory(segments, Termination.MAX_SWITCHES, tuple(x), elapsed)

        tied = np.flatnonzero(times <= first + _TIE_WINDOW)
        coordinate = int(tied[0])
        entry = x
        x = _advance(x, attractor, first)
        x[tied] = 0.0
        if not np.all(np.isfinite(x)):
            raise NumericalFailureError(f"State became non-finite after {elapsed + first} time units")

        segments.append(TrajectorySegment(part, tuple(entry), tuple(attractor), first, coordinate + 1))
        elapsed += first
        part = IndexSet(net.n, part.mask ^ (1 << coordinate))
        switch_log.append((elapsed, x.copy()))

        if _is_chatter(switch_log):
            log_warning("Dynamics", "Chatter",
                        f"Repeated switching near one boundary point at t={elapsed}", {"state": x.tolist()})
            return Trajectory(segments, Termination.CHATTER, tuple(x), elapsed)


def trajectory_final_state(traj: Trajectory) -> np.ndarray:
    """End state re-evaluated from the last segment; a crossing coordinate ends at exactly 0."""
    last = traj.segments[-1]
    x = state_at(last, last.duration)
    if last.exit_coordinate is not None:
        x[last.exit_coordinate - 1] = 0.0
    return x


def sample_trajectory(traj: Trajectory, dt: float) -> np.ndarray:
    """Rows (t, x_1, ..., x_n) every dt time units, plus the final state."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    ends = np.cumsum([segment.duration for segment in traj.segments])
    rows = []
    for t in np.arange(0.0, traj.elapsed, dt):
        index = min(int(np.searchsorted(ends, t, side="right")), len(traj.segments) - 1)
        start = ends[index] - traj.segments[index].duration
        offset = min(max(t - start, 0.0), traj.segments[index].duration)
        rows.append([float(t), *state_at(traj.segments[index], offset)])
    rows.append([traj.elapsed, *traj.final_state])
    return np.array(rows)


def vector_field_grid(net: GlassNetwork,
                      ranges: Sequence[Tuple[float, float, int]],
                      fixed: Optional[Mapping[int, float]] = None) -> List[Dict[str, float]]:
    """
    Velocity -x + W theta(x) on a grid over the two free coordinates.

    `fixed` maps 1-based coordinates to their values; the clamped unit of an
    embedded-input network defaults to 1. A single range is used for both axes.
    """
    fixed = dict(fixed or {})
    if net.clamped_unit is not None:
        fixed.setdefault(net.clamped_unit, 1.0)
    for axis in fixed:
        if not 1 <= axis <= net.n:
            raise DimensionMismatchError(f"Fixed coordinate {axis} outside 1..{net.n}")
    free = [i for i in range(1, net.n + 1) if i not in fixed]
    if len(free) != 2:
        raise DimensionMismatchError(f"A vector field needs exactly 2 free axes, got {len(free)}")

    ranges = list(ranges)
    if len(ranges) == 1:
        ranges = ranges * 2
    if len(ranges) != 2:
        raise ValueError(f"Expected one or two axis ranges, got {len(ranges)}")
    axes = []
    for low, high, steps in ranges:
        if int(steps) < 1:
            raise ValueError(f"Grid steps must be positive, got {steps}")
        axes.append(np.linspace(float(low), float(high), int(steps)))

    base = np.zeros(net.n)
    for axis, value in fixed.items():
        base[axis - 1] = value
    first, second = free[0] - 1, free[1] - 1

    rows = []
    for u in axes[0]:
        for v in axes[1]:
            point = base.copy()
            point[first], point[second] = u, v
            velocity = -point + net.w @ heaviside(point)
            rows.append({"x": float(u), "y": float(v), "vx": float(velocity[first]), "vy": float(velocity[second])})
    return rows
