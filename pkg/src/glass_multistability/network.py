# glass_multistability/network.py

"""
Construction and validation of Glass networks  dx/dt = -x + W theta(x).

A network is either driven only by its own units (vanishing input) or carries
an external input embedded as a clamped feedforward unit in the last
position, whose row of W is (0, ..., 0, 1). Construction enforces the output
constraint: W p_a must not vanish for any admissible nonempty code.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from .config import get_setting
from .core import code_block, code_vector, mask_chunks
from .logging_utils import log_event, log_warning
from .models import (
    ConstraintViolationError,
    DimensionMismatchError,
    EnumerationTooLargeError,
    IndexSet,
    InputMode,
    NetworkFormatError,
    WeightMatrix,
)


@dataclass(frozen=True, eq=False)
class GlassNetwork:
    weights: WeightMatrix
    input_mode: InputMode = InputMode.VANISHING
    allow_violations: bool = False

    def __post_init__(self):
        if not isinstance(self.weights, WeightMatrix):
            object.__setattr__(self, "weights", WeightMatrix(self.weights))
        if self.input_mode is InputMode.EMBEDDED_NONVANISHING:
            expected = np.zeros(self.n)
            expected[-1] = 1.0
            if self.n < 2 or not np.array_equal(self.w[-1], expected):
                raise DimensionMismatchError(
                    "Embedded-input networks need at least two units and a last row (0, ..., 0, 1)")

        try:
            violations = validate_constraint(self)
        except EnumerationTooLargeError as e:
            log_warning("Network", "ConstraintUnchecked",
                        f"Output constraint not verified: {e}", {"n": self.n})
            return
        if violations:
            if not self.allow_violations:
                raise ConstraintViolationError(violations)
            log_warning("Network", "ConstraintViolation",
                        "Network violates the output constraint; continuing because violations are allowed",
                        {"violations": [v.to_list() for v in violations]})

    @property
    def w(self) -> np.ndarray:
        return self.weights.w

    @property
    def n(self) -> int:
        return self.weights.n

    @property
    def clamped_unit(self) -> Optional[int]:
        """1-based index of the clamped input unit, None without embedded input."""
        return self.n if self.input_mode is InputMode.EMBEDDED_NONVANISHING else None

    @property
    def required_mask(self) -> int:
        """Bits every admissible part must contain (the clamped unit, if any)."""
        return 1 << (self.n - 1) if self.clamped_unit is not None else 0

    def admits(self, a: IndexSet) -> bool:
        return a.n == self.n and a.mask & self.required_mask == self.required_mask

    def admissible_subsets(self) -> List[IndexSet]:
        """Parts the dynamics can visit, ascending bitmask order."""
        return [IndexSet(self.n, int(m)) for chunk in mask_chunks(self.n, required=self.required_mask) for m in chunk]


def embed_input(w: Union[WeightMatrix, Sequence[Sequence[float]], np.ndarray],
                mu: Sequence[float],
                allow_violations: bool = False) -> GlassNetwork:
    """Block matrix [[w, mu], [0, 1]]: the input becomes a clamped feedforward unit."""
    weights = w if isinstance(w, WeightMatrix) else WeightMatrix(np.asarray(w, dtype=float))
    mu_array = np.asarray(mu, dtype=float)
    if mu_array.ndim != 1 or mu_array.shape[0] != weights.n:
        raise DimensionMismatchError(f"Input vector has shape {mu_array.shape}, expected ({weights.n},)")
    if not np.all(np.isfinite(mu_array)):
        raise DimensionMismatchError("Input vector contains non-finite entries")

    n = weights.n
    block = np.zeros((n + 1, n + 1))
    block[:n, :n] = weights.w
    block[:n, n] = mu_array
    block[n, n] = 1.0
    return GlassNetwork(WeightMatrix(block), InputMode.EMBEDDED_NONVANISHING, allow_violations)


def attractor_point(net: GlassNetwork, a: IndexSet) -> np.ndarray:
    """W_a = W p_a, the sum of the columns of W indexed by a."""
    if a.n != net.n:
        raise DimensionMismatchError(f"Set lives in dimension {a.n}, network in {net.n}")
    return net.w @ code_vector(a)


def validate_constraint(net: GlassNetwork) -> List[IndexSet]:
    """
    Every admissible nonempty subset whose attractor point vanishes identically.
    Vanishing input exempts the empty set; embedded input only checks the
    parts containing the clamped unit (the dynamics lives on x_n = 1).
    """
    violations: List[IndexSet] = []
    near_zero: List[List[int]] = []
    threshold = get_setting("degeneracy_threshold")

    for masks in mask_chunks(net.n, required=net.required_mask):
        masks = masks[masks != 0]
        if not masks.size:
            continue
        attractors = code_block(net.n, masks) @ net.w.T
        vanishing = np.all(attractors == 0.0, axis=1)
        borderline = np.any(np.abs(attractors) < threshold, axis=1) & ~vanishing
        violations.extend(IndexSet(net.n, int(m)) for m in masks[vanishing])
        near_zero.extend(IndexSet(net.n, int(m)).to_list() for m in masks[borderline])

    if near_zero:
        log_warning("Network", "NearZeroAttractor",
                    f"{len(near_zero)} parts have attractor components below {threshold}",
                    {"sets": near_zero[:20]})
    return violations


def near_zero_attractors(net: GlassNetwork) -> List[IndexSet]:
    """Admissible parts with some |W_a^i| below the degeneracy threshold (zero included)."""
    threshold = get_setting("degeneracy_threshold")
    found: List[IndexSet] = []
    for masks in mask_chunks(net.n, required=net.required_mask):
        masks = masks[masks != 0]
        if not masks.size:
            continue
        attractors = code_block(net.n, masks) @ net.w.T
        flagged = np.any(np.abs(attractors) < threshold, axis=1)
        found.extend(IndexSet(net.n, int(m)) for m in masks[flagged])
    return found


# --- Network files ---

def network_from_dict(data: Dict[str, Any], allow_violations: bool = False) -> GlassNetwork:
    """Build a network from {"n": int, "weights": [[...]], "input": null | [...]}."""
    if not isinstance(data, dict):
        raise NetworkFormatError("Network file must contain a JSON object")
    missing = [key for key in ("n", "weights") if key not in data]
    if missing:
        raise NetworkFormatError(f"Network file is missing {', '.join(missing)}")

    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise NetworkFormatError(f"'n' must be a positive integer, got {n!r}")
    try:
        weights = np.array(data["weights"], dtype=float)
    except (TypeError, ValueError) as e:
        raise NetworkFormatError(f"'weights' is not a numeric matrix: {e}")
    if weights.shape != (n, n):
        raise NetworkFormatError(f"'weights' has shape {weights.shape}, expected ({n}, {n})")

    mu = data.get("input")
    if mu is None:
        return GlassNetwork(WeightMatrix(weights), InputMode.VANISHING, allow_violations)
    try:
        mu_array = np.array(mu, dtype=float)
    except (TypeError, ValueError) as e:
        raise NetworkFormatError(f"'input' is not a numeric vector: {e}")
    if mu_array.shape != (n,):
        raise NetworkFormatError(f"'input' has shape {mu_array.shape}, expected ({n},)")
    return embed_input(WeightMatrix(weights), mu_array, allow_violations)


def load_network(path: Union[str, Path], allow_violations: bool = False) -> GlassNetwork:
    """Read and validate a network file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise NetworkFormatError(f"Cannot read network file {path}: {e}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise NetworkFormatError(f"Invalid JSON in {path}: {e.msg}", e.lineno, e.colno)

    net = network_from_dict(data, allow_violations)
    log_event("Network", f"Loaded {net.n}-unit network from {path}", {"input_mode": net.input_mode.value})
    return net
