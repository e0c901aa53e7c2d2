# glass_multistability/coupling.py

"""
Block-structure predicates and the composition, decomposition and coupling
tests between stable sets.

Every check computes both the algebraic predicate and the ground truth from
direct stability tests. The two must agree; a disagreement is an
InternalConsistencyError, never a user error.
"""

from typing import Optional, Union

import numpy as np

from .config import get_setting
from .core import signature_vector
from .logging_utils import log_error, log_warning
from .models import (
    CouplingVerdict,
    IndexSet,
    InternalConsistencyError,
    InvalidSetError,
    NotStableError,
    WeightMatrix,
    Witness,
)
from .network import GlassNetwork, attractor_point
from .stability import is_stable_set


def _as_array(w: Union[WeightMatrix, GlassNetwork, np.ndarray]) -> np.ndarray:
    if isinstance(w, GlassNetwork):
        return w.w
    if isinstance(w, WeightMatrix):
        return w.w
    return np.asarray(w, dtype=float)


def _block_sums(w: np.ndarray, a: IndexSet, g: IndexSet):
    if a.n != w.shape[0] or g.n != w.shape[0]:
        raise InvalidSetError(f"Sets must live in dimension {w.shape[0]}")
    if not a.issubset(g):
        raise InvalidSetError(f"{a} is not a subset of {g}")
    rest = g.difference(a)
    rows = g.indices()
    inside = w[np.ix_(rows, a.indices())].sum(axis=1)
    outside = w[np.ix_(rows, rest.indices())].sum(axis=1)
    in_a = np.array([i + 1 in a for i in rows], dtype=bool)
    return rows, inside, outside, in_a


def _warn_ties(kind: str, a: IndexSet, g: IndexSet, ties: np.ndarray) -> None:
    if np.any(ties):
        log_warning("Coupling", "DegenerateTie",
                    f"{kind} test for {a} within {g} has exact ties; reported as false",
                    {"rows": [int(r) + 1 for r in np.flatnonzero(ties)]})


def is_block_diag_dominant(w: Union[WeightMatrix, GlassNetwork, np.ndarray], a: IndexSet, g: IndexSet) -> bool:
    """
    Rows of a are dominated by their a-block, rows of g minus a by theirs:
    |sum_{j in a} w_ij| > |sum_{j in g\\a} w_ij| for i in a and the reverse
    for i in g\\a. Strict.
    """
    _, inside, outside, in_a = _block_sums(_as_array(w), a, g)
    own = np.where(in_a, np.abs(inside), np.abs(outside))
    other = np.where(in_a, np.abs(outside), np.abs(inside))
    _warn_ties("Block dominance", a, g, own == other)
    return bool(np.all(own > other))


def is_block_Z(w: Union[WeightMatrix, GlassNetwork, np.ndarray], a: IndexSet, g: IndexSet) -> bool:
    """Off-diagonal block row sums are negative: sum over g\\a for rows in a, over a for rows in g\\a."""
    _, inside, outside, in_a = _block_sums(_as_array(w), a, g)
    cross = np.where(in_a, outside, inside)
    _warn_ties("Block Z", a, g, cross == 0.0)
    return bool(np.all(cross < 0.0))


def _first_failure(values: np.ndarray, *columns: np.ndarray) -> Optional[Witness]:
    failing = np.flatnonzero(~values)
    if not failing.size:
        return None
    i = int(failing[0])
    return Witness(i + 1, tuple(float(c[i]) for c in columns))


def _settle(theorem: str, holds: bool, recomputed: bool, witness: Optional[Witness],
            inputs: dict) -> CouplingVerdict:
    if holds != recomputed:
        message = f"{theorem}: predicate gives {holds}, direct stability gives {recomputed}"
        log_error("Coupling", "InternalConsistency", message, inputs)
        raise InternalConsistencyError(message)
    return CouplingVerdict(theorem, holds, recomputed, witness)


def _require_stable(net: GlassNetwork, a: IndexSet, role: str) -> None:
    if a.is_empty():
        raise InvalidSetError(f"The {role} set must be nonempty")
    if not is_stable_set(net, a).is_stable:
        raise NotStableError(f"The {role} set {a} is not stable")


def compose_check(net: GlassNetwork, a: IndexSet, b: IndexSet) -> CouplingVerdict:
    """For disjoint stable a and b: a u b is stable iff W is a-block diagonally dominant on a u b."""
    _require_stable(net, a, "first")
    _require_stable(net, b, "second")
    if not a.isdisjoint(b):
        raise InvalidSetError(f"{a} and {b} must be disjoint")

    g = a.union(b)
    holds = is_block_diag_dominant(net.w, a, g)
    recomputed = is_stable_set(net, g).is_stable

    w_a, w_b = attractor_point(net, a), attractor_point(net, b)
    rows_in_a = np.isin(np.arange(net.n), a.indices())
    in_g = np.isin(np.arange(net.n), g.indices())
    dominant = np.where(rows_in_a, np.abs(w_a) > np.abs(w_b), np.abs(w_b) > np.abs(w_a)) | ~in_g
    witness = _first_failure(dominant, w_a, w_b)
    return _settle("compose", holds, recomputed, witness, {"a": a.to_list(), "b": b.to_list()})


def decompose_check(net: GlassNetwork, g: IndexSet, a: IndexSet) -> CouplingVerdict:
    """
    For stable g and a proper nonempty a within it (b = g\\a): a and b are both
    stable iff W is an a-block Z-matrix on g and W_a^i W_b^i > 0 outside g.
    """
    _require_stable(net, g, "enclosing")
    if a.is_empty() or a == g or not a.issubset(g):
        raise InvalidSetError(f"{a} must be a proper nonempty subset of {g}")
    b = g.difference(a)
    for part in (a, b):
        if not net.admits(part):
            raise InvalidSetError(f"{part} is not an admissible part of this network")

    w_a, w_b = attractor_point(net, a), attractor_point(net, b)
    outside = np.ones(net.n, dtype=bool)
    outside[g.indices()] = False
    product_ok = (w_a * w_b > 0.0) | ~outside

    holds = is_block_Z(net.w, a, g) and bool(np.all(product_ok))
    recomputed = is_stable_set(net, a).is_stable and is_stable_set(net, b).is_stable

    rows_in_a = np.isin(np.arange(net.n), a.indices())
    cross_ok = np.where(rows_in_a, w_b < 0.0, w_a < 0.0) | outside
    witness = _first_failure(cross_ok & product_ok, w_a, w_b)
    return _settle("decompose", holds, recomputed, witness, {"g": g.to_list(), "a": a.to_list()})


def coupling_check(net: GlassNetwork, a: IndexSet, b: IndexSet) -> CouplingVerdict:
    """For stable a: b is stable iff (s_a W_a) o (s_b W_b) > 0 componentwise."""
    _require_stable(net, a, "reference")
    if b.is_empty():
        raise InvalidSetError("The tested set must be nonempty")

    margin_a = signature_vector(a) * attractor_point(net, a)
    margin_b = signature_vector(b) * attractor_point(net, b)
    positive = margin_a * margin_b > 0.0

    holds = bool(np.all(positive))
    recomputed = is_stable_set(net, b).is_stable
    witness = _first_failure(positive, margin_a, margin_b)
    return _settle("coupling", holds, recomputed, witness, {"a": a.to_list(), "b": b.to_list()})


def triple_coupling_check(net: GlassNetwork, a: IndexSet, b: IndexSet, g: IndexSet) -> CouplingVerdict:
    """For stable a and b: g is stable iff the three signed attractors have a positive product componentwise."""
    _require_stable(net, a, "first")
    _require_stable(net, b, "second")
    if g.is_empty():
        raise InvalidSetError("The tested set must be nonempty")

    margins = [signature_vector(s) * attractor_point(net, s) for s in (a, b, g)]
    positive = margins[0] * margins[1] * margins[2] > 0.0

    holds = bool(np.all(positive))
    recomputed = is_stable_set(net, g).is_stable
    witness = _first_failure(positive, *margins)
    return _settle("triple", holds, recomputed, witness,
                   {"a": a.to_list(), "b": b.to_list(), "g": g.to_list()})
