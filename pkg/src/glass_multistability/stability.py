# glass_multistability/stability.py

"""
Stable-set analysis.

A part P_a contains its attractor point W_a (and that point is then a stable
fixed point) iff S_a W p_a > 0 componentwise. Every fixed point of the model
is stable, so searching fixed points and searching stable states coincide.
"""

from typing import List, Optional

import numpy as np

from .config import get_setting
from .core import code_block, complement, mask_chunks, signature_vector, subsets_of
from .logging_utils import log_event, log_warning
from .models import (
    DimensionMismatchError,
    IndexSet,
    InputMode,
    InvalidSetError,
    StableSetReport,
    Verdict,
)
from .network import GlassNetwork, attractor_point

# Prefilter slack for the vectorised pass; candidates are re-decided exactly.
_PREFILTER_SLACK = 1e-9


def _check_admissible(net: GlassNetwork, a: IndexSet) -> None:
    if a.n != net.n:
        raise DimensionMismatchError(f"Set lives in dimension {a.n}, network in {net.n}")
    if net.input_mode is InputMode.EMBEDDED_NONVANISHING:
        if a.is_empty():
            raise InvalidSetError("The empty set is not a part of an embedded-input network")
        if net.clamped_unit not in a:
            raise InvalidSetError(
                f"Set {a} lacks the clamped input unit {net.clamped_unit}; the dynamics lives on x_n = 1")


def is_stable_set(net: GlassNetwork, a: IndexSet) -> StableSetReport:
    """
    Decide whether part a contains its attractor point.

    The margin is min_i s_a^i W_a^i; the verdict is Stable iff it is strictly
    positive. The empty set of a vanishing-input network is reported as an
    origin candidate and never counted as stable.
    """
    _check_admissible(net, a)
    attractor = attractor_point(net, a)
    signed = signature_vector(a) * attractor
    margin = float(np.min(signed)) + 0.0

    if a.is_empty():
        return StableSetReport(a, Verdict.ORIGIN_CANDIDATE, tuple(attractor.tolist()), margin)

    outside = np.ones(net.n, dtype=bool)
    outside[a.indices()] = False
    boundary = bool(np.any(attractor[outside] == 0.0))
    threshold = get_setting("degeneracy_threshold")
    near_degenerate = abs(margin) < threshold

    if boundary:
        log_warning("Stability", "BoundaryFixedPoint",
                    f"Attractor of {a} has a zero component outside the set; treated as not stable",
                    {"attractor": attractor.tolist()})
    elif near_degenerate:
        log_warning("Stability", "NearDegenerate",
                    f"Margin of {a} is within {threshold} of zero", {"margin": margin})

    verdict = Verdict.STABLE if margin > 0.0 else Verdict.UNSTABLE
    return StableSetReport(a, verdict, tuple(attractor.tolist()), margin, boundary, near_degenerate)


def enumerate_stable_sets(net: GlassNetwork, include_all: bool = False) -> List[StableSetReport]:
    """
    Reports for the admissible parts of the network, ascending size then bitmask.

    By default only Stable parts and the origin candidate are returned; with
    include_all every admissible part gets a report.
    """
    reports: List[StableSetReport] = []
    for masks in mask_chunks(net.n, required=net.required_mask):
        if include_all:
            candidates = masks
        else:
            codes = code_block(net.n, masks)
            margins = np.min((2.0 * codes - 1.0) * (codes @ net.w.T), axis=1)
            candidates = masks[(margins > -_PREFILTER_SLACK) | (masks == 0)]
        for mask in candidates:
            report = is_stable_set(net, IndexSet(net.n, int(mask)))
            if include_all or report.verdict is not Verdict.UNSTABLE:
                reports.append(report)

    reports.sort(key=lambda r: r.set.sort_key())
    log_event("Stability", f"Enumerated stable sets of a {net.n}-unit network",
              {"stable": sum(r.is_stable for r in reports), "reported": len(reports)})
    return reports


def multistability_degree(net: GlassNetwork) -> int:
    """Number of stable sets (the origin candidate does not count)."""
    return sum(1 for r in enumerate_stable_sets(net) if r.is_stable)


def stable_sets_output_model(net: GlassNetwork) -> List[IndexSet]:
    """
    Stable sets of the output-nonlinearity model dy/dt = -y + theta(W y).

    Its fixed points are codes p with p = theta(W p); they are hyperbolic (and
    stable) when no component of W p vanishes. This is computed without the
    signature margin so it can serve as an independent check of
    enumerate_stable_sets.
    """
    found: List[IndexSet] = []
    for masks in mask_chunks(net.n, required=net.required_mask):
        masks = masks[masks != 0]
        if not masks.size:
            continue
        codes = code_block(net.n, masks)
        drive = codes @ net.w.T
        fixed = np.all((drive > 0.0) == (codes == 1.0), axis=1) & np.all(drive != 0.0, axis=1)
        found.extend(IndexSet(net.n, int(m)) for m in masks[fixed])
    found.sort(key=IndexSet.sort_key)
    return found


def decomposed_verdict(net: GlassNetwork, a: IndexSet) -> bool:
    """The two-block form of the stable-set test: W[a] 1 > 0 and W[a^c, a] 1 < 0."""
    _check_admissible(net, a)
    if a.is_empty():
        raise InvalidSetError("The two-block test needs a nonempty set")
    inside = a.indices()
    outside = complement(a).indices()
    inner_ok = bool(np.all(net.w[np.ix_(inside, inside)].sum(axis=1) > 0.0))
    if outside.size == 0:
        return inner_ok
    return inner_ok and bool(np.all(net.w[np.ix_(outside, inside)].sum(axis=1) < 0.0))


def minimally_stable_sets(net: GlassNetwork, reports: Optional[List[StableSetReport]] = None) -> List[IndexSet]:
    """Stable sets with no stable proper subset."""
    reports = enumerate_stable_sets(net) if reports is None else reports
    stable_masks = {r.set.mask for r in reports if r.is_stable}
    minimal = []
    for r in reports:
        if not r.is_stable:
            continue
        if not any(sub.mask in stable_masks for sub in subsets_of(r.set, proper=True, nonempty=True)):
            minimal.append(r.set)
    return minimal
