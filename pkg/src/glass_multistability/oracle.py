# glass_multistability/oracle.py

"""
Seeded self-checks that compare every closed-form result against an
independent computation:

- counts:      counting formulas vs enumeration of row signatures
- theorems:    sign, factorization and coupling theorems vs direct stability
- equivalence: output-model fixed points vs stable-set enumeration
- dynamics:    simulated trajectories vs enumerated attractors

Each scope returns an OracleReport. Mismatches are failures; disagreements of
the published embedded-input nested count with enumeration are recorded as
diagnostics.
"""

import itertools
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .config import get_setting
from .core import all_subsets, subsets_of
from .coupling import compose_check, coupling_check, decompose_check, triple_coupling_check
from .dynamics import simulate, state_at
from .factorization import eigen_check, factorize, verify_factorization
from .logging_utils import log_event, log_oracle_mismatch
from .models import (
    ConstraintViolationError,
    CountMode,
    FamilyKind,
    IndexSet,
    InternalConsistencyError,
    NotStableError,
    OracleReport,
    SignPattern,
    StableFamily,
    Termination,
    WeightMatrix,
)
from .network import GlassNetwork, embed_input, network_from_dict
from .signs import (
    adversarial_matrix,
    allows_stable,
    brute_force_row_signatures,
    count_allowed_row_signatures,
    counted_rows,
    is_sign_stable,
    sign_pattern,
    witness_matrix,
)
from .stability import decomposed_verdict, enumerate_stable_sets, is_stable_set, stable_sets_output_model

SCOPES = ("counts", "theorems", "equivalence", "dynamics")

EXAMPLE_NETWORKS: Dict[str, Dict[str, Any]] = {
    "example1": {"n": 2, "weights": [[1, 4], [2, 3]], "input": None},
    "example2": {"n": 2, "weights": [[2, 0], [0, 2]], "input": [-1, -1]},
}


def _mismatch(report: OracleReport, module: str, inputs: Dict[str, Any], expected: Any, got: Any) -> None:
    report.mismatches.append({"module": module, "inputs": inputs, "expected": expected, "got": got})
    log_oracle_mismatch(module, inputs, expected, got)


def _expect(report: OracleReport, section: str, module: str, inputs: Dict[str, Any],
            expected: Any, got: Any) -> None:
    report.record(section)
    if expected != got:
        _mismatch(report, module, inputs, expected, got)


def _weights_to_list(w: np.ndarray) -> List[List[float]]:
    return [[float(v) for v in row] for row in w]


# --- Random inputs ---

def random_network(rng: np.random.Generator, n: int, embedded: bool = False) -> GlassNetwork:
    """Gaussian weights; redrawn until the output constraint holds."""
    while True:
        try:
            if embedded:
                return embed_input(rng.normal(size=(n - 1, n - 1)), rng.normal(size=n - 1))
            return GlassNetwork(WeightMatrix(rng.normal(size=(n, n))))
        except ConstraintViolationError:
            continue


def random_family(rng: np.random.Generator, kind: FamilyKind, n: int) -> StableFamily:
    """A well-formed family over [n]."""
    order = [int(u) + 1 for u in rng.permutation(n)]
    if kind is FamilyKind.SINGLE or (kind is FamilyKind.DISJOINT and n < 2):
        size = int(rng.integers(1, n + 1))
        return StableFamily(kind, (IndexSet.from_members(n, order[:size]),))
    if kind is FamilyKind.DISJOINT:
        count = int(rng.integers(2, min(n, 3) + 1))
        cuts = sorted(int(c) for c in rng.choice(np.arange(1, n + 1), size=count, replace=False))
        starts = [0] + cuts[:-1]
        return StableFamily(kind, tuple(IndexSet.from_members(n, order[s:e]) for s, e in zip(starts, cuts)))
    length = int(rng.integers(1, min(n, 3) + 1))
    sizes = sorted(int(s) for s in rng.choice(np.arange(1, n + 1), size=length, replace=False))
    return StableFamily(kind, tuple(IndexSet.from_members(n, order[:size]) for size in sizes))


def _lift(fam: StableFamily, n: int) -> StableFamily:
    """Add the clamped unit n to every member of a family over [n-1]."""
    clamped = 1 << (n - 1)
    return StableFamily(fam.kind, tuple(IndexSet(n, a.mask | clamped) for a in fam.sets))


# --- Scopes ---

def check_counts(n: int, trials: int, seed: int, modes: Optional[List[CountMode]] = None) -> OracleReport:
    """Counting formulas against enumeration for dimensions 1..n."""
    report = OracleReport("counts", seed)
    rng = np.random.default_rng([seed, 0])
    modes = list(CountMode) if modes is None else modes

    for mode in modes:
        for dim in range(2 if mode is CountMode.NONVANISHING_INPUT else 1, n + 1):
            for kind in FamilyKind:
                for _ in range(trials):
                    if mode is CountMode.NONVANISHING_INPUT:
                        fam = _lift(random_family(rng, kind, dim - 1), dim)
                    else:
                        fam = random_family(rng, kind, dim)
                    for row in counted_rows(dim, mode):
                        formula = count_allowed_row_signatures(fam, dim, row, mode)
                        enumerated = brute_force_row_signatures(fam, dim, row, mode)
                        report.record(f"counts/{mode.value}")
                        if formula == enumerated:
                            continue
                        inputs = {"family": str(fam), "n": dim, "row": row, "mode": mode.value}
                        if mode is CountMode.NONVANISHING_INPUT and fam.kind is FamilyKind.NESTED:
                            report.diagnostics.append({**inputs, "formula": formula, "brute_force": enumerated})
                        else:
                            _mismatch(report, "signs", inputs, enumerated, formula)
    return report


def _check_sign_theorems(report: OracleReport, rng: np.random.Generator, net: GlassNetwork) -> None:
    s = sign_pattern(net.weights)
    a = IndexSet(net.n, int(rng.integers(1, 1 << net.n)))
    inputs = {"pattern": s.s.tolist(), "set": a.to_list()}

    if allows_stable(s, a):
        witness = GlassNetwork(WeightMatrix(witness_matrix(s, a)), allow_violations=True)
        _expect(report, "signs/witness", "signs", inputs, True, is_stable_set(witness, a).is_stable)
    else:
        for _ in range(5):
            positive = rng.uniform(0.01, 10.0, size=(net.n, net.n))
            sample = GlassNetwork(WeightMatrix(positive * s.s), allow_violations=True)
            _expect(report, "signs/necessary", "signs", inputs, False, is_stable_set(sample, a).is_stable)

    if is_sign_stable(s, a):
        for _ in range(5):
            positive = rng.uniform(0.01, 10.0, size=(net.n, net.n))
            sample = GlassNetwork(WeightMatrix(positive * s.s), allow_violations=True)
            _expect(report, "signs/sign_stable", "signs", inputs, True, is_stable_set(sample, a).is_stable)
        for sub in subsets_of(a, proper=True, nonempty=True):
            _expect(report, "signs/minimal", "signs", {**inputs, "subset": sub.to_list()},
                    False, allows_stable(s, sub))
    else:
        counter = GlassNetwork(WeightMatrix(adversarial_matrix(s, a)), allow_violations=True)
        _expect(report, "signs/adversarial", "signs", inputs, False, is_stable_set(counter, a).is_stable)


def _check_factorization(report: OracleReport, net: GlassNetwork, a: IndexSet, stable: bool) -> None:
    inputs = {"weights": _weights_to_list(net.w), "set": a.to_list()}
    try:
        f = factorize(net, a)
    except NotStableError:
        _expect(report, "factorization", "factorization", inputs, stable, False)
        return
    _expect(report, "factorization", "factorization", inputs, stable, True)
    check = verify_factorization(f, net)
    _expect(report, "factorization/verify", "factorization", inputs, [], check.violations)
    residuals = eigen_check(f)
    tolerance = get_setting("reconstruction_tolerance")
    _expect(report, "factorization/eigen", "factorization", inputs, True,
            max(residuals.values()) <= tolerance)


def _guarded(report: OracleReport, section: str, inputs: Dict[str, Any], check: Callable[[], Any]) -> None:
    report.record(section)
    try:
        check()
    except InternalConsistencyError as e:
        _mismatch(report, "coupling", inputs, "predicate agrees with direct stability", str(e))


def _check_coupling(report: OracleReport, rng: np.random.Generator, net: GlassNetwork,
                    stable: List[IndexSet]) -> None:
    weights = _weights_to_list(net.w)
    for a, b in itertools.combinations(stable, 2):
        if a.isdisjoint(b):
            _guarded(report, "coupling/compose", {"weights": weights, "a": a.to_list(), "b": b.to_list()},
                     lambda: compose_check(net, a, b))
    for g in stable:
        for a in subsets_of(g, proper=True, nonempty=True):
            _guarded(report, "coupling/decompose", {"weights": weights, "g": g.to_list(), "a": a.to_list()},
                     lambda: decompose_check(net, g, a))
    for a in stable:
        b = IndexSet(net.n, int(rng.integers(1, 1 << net.n)))
        _guarded(report, "coupling/coupling", {"weights": weights, "a": a.to_list(), "b": b.to_list()},
                 lambda: coupling_check(net, a, b))
    if stable:
        a, b = stable[0], stable[-1]
        g = IndexSet(net.n, int(rng.integers(1, 1 << net.n)))
        _guarded(report, "coupling/triple",
                 {"weights": weights, "a": a.to_list(), "b": b.to_list(), "g": g.to_list()},
                 lambda: triple_coupling_check(net, a, b, g))


def check_theorems(n: int, trials: int, seed: int) -> OracleReport:
    """Sign, factorization and coupling theorems on random networks of size 2..n."""
    report = OracleReport("theorems", seed)
    rng = np.random.default_rng([seed, 1])
    for _ in range(trials):
        net = random_network(rng, int(rng.integers(2, max(n, 2) + 1)))
        reports = enumerate_stable_sets(net, include_all=True)
        stable = [r.set for r in reports if r.is_stable]

        for r in reports:
            if r.set.is_empty():
                continue
            _expect(report, "stability/decomposed", "stability",
                    {"weights": _weights_to_list(net.w), "set": r.set.to_list()},
                    r.is_stable, decomposed_verdict(net, r.set))

        _check_sign_theorems(report, rng, net)
        candidate = IndexSet(net.n, int(rng.integers(1, 1 << net.n)))
        _check_factorization(report, net, candidate, is_stable_set(net, candidate).is_stable)
        for a in stable[:2]:
            _check_factorization(report, net, a, True)
        _check_coupling(report, rng, net, stable)
    return report


def check_equivalence(n: int, trials: int, seed: int) -> OracleReport:
    """Output-model fixed points against stable-set enumeration."""
    report = OracleReport("equivalence", seed)
    rng = np.random.default_rng([seed, 2])
    networks = [(name, network_from_dict(data)) for name, data in EXAMPLE_NETWORKS.items()]
    for index in range(trials):
        dim = int(rng.integers(2, max(n, 2) + 1))
        embedded = bool(index % 2)
        networks.append((f"random-{index}", random_network(rng, dim, embedded)))

    for name, net in networks:
        expected = [r.set.to_list() for r in enumerate_stable_sets(net) if r.is_stable]
        got = [a.to_list() for a in stable_sets_output_model(net)]
        _expect(report, "equivalence", "stability", {"network": name, "weights": _weights_to_list(net.w)},
                expected, got)
    return report


def check_dynamics(n: int, trials: int, seed: int, starts: int = 20) -> OracleReport:
    """Simulated trajectories end at enumerated attractors; segments follow the exact flow."""
    report = OracleReport("dynamics", seed)
    rng = np.random.default_rng([seed, 3])
    tolerance = get_setting("convergence_tolerance")

    for _ in range(trials):
        net = random_network(rng, int(rng.integers(2, max(n, 2) + 1)))
        attractors = {r.set.mask: np.array(r.attractor) for r in enumerate_stable_sets(net)}
        weights = _weights_to_list(net.w)
        for _ in range(starts):
            x0 = rng.normal(scale=3.0, size=net.n)
            traj = simulate(net, x0)
            inputs = {"weights": weights, "x0": x0.tolist()}

            if traj.termination is Termination.CONVERGED:
                mask = traj.converged_set.mask
                _expect(report, "dynamics/converged", "dynamics", inputs, True, mask in attractors)
                if mask in attractors:
                    gap = float(np.max(np.abs(np.array(traj.final_state) - attractors[mask])))
                    _expect(report, "dynamics/attractor", "dynamics", inputs, True, gap <= tolerance)

            first = traj.segments[0]
            entry, target = np.array(first.entry_state), np.array(first.attractor)
            for t in np.linspace(0.0, first.duration, 12)[1:-1]:
                exact = target + (entry - target) * np.exp(-t)
                _expect(report, "dynamics/segment", "dynamics", inputs, True,
                        float(np.max(np.abs(state_at(first, t) - exact))) <= 1e-12 * max(1.0, float(np.max(np.abs(exact)))))

            for segment in traj.segments:
                if segment.exit_coordinate is None:
                    continue
                exit_value = state_at(segment, segment.duration)[segment.exit_coordinate - 1]
                _expect(report, "dynamics/crossing", "dynamics", {**inputs, "coordinate": segment.exit_coordinate},
                        True, abs(exit_value) <= tolerance)
    return report


def run_oracle(scope: str, n: int, trials: int, seed: int = 0,
               modes: Optional[List[CountMode]] = None) -> OracleReport:
    """Run one scope, or every scope for "all", and log the summary."""
    if scope not in SCOPES + ("all",):
        raise ValueError(f"Unknown oracle scope {scope!r}; choose from {', '.join(SCOPES + ('all',))}")
    if n < 1 or trials < 1:
        raise ValueError("n and trials must be positive")

    runners = {
        "counts": lambda: check_counts(n, trials, seed, modes),
        "theorems": lambda: check_theorems(n, trials, seed),
        "equivalence": lambda: check_equivalence(n, trials, seed),
        "dynamics": lambda: check_dynamics(n, trials, seed),
    }
    if scope != "all":
        report = runners[scope]()
    else:
        report = OracleReport("all", seed)
        for name in SCOPES:
            report.merge(runners[name]())

    log_event("Oracle", f"Scope {scope} finished",
              {"checks": report.checks, "mismatches": len(report.mismatches),
               "diagnostics": len(report.diagnostics), "seed": seed})
    return report
