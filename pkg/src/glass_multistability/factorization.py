# glass_multistability/factorization.py

"""
Semipositive factorization of stable sets.

A nonempty set a is stable iff W = S_a Y X^-1 with X nonnegative, Y positive
and X^-1 p_a seminonnegative. The construction used here is

    X = p_a 1^T + eps I,    Y = y 1^T + eps S_a W,    y = S_a W p_a,

so that Y X^-1 = S_a W and X^-1 p_a = p_a / (k + eps). eps is halved until Y
is entrywise positive.
"""

from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, lu_factor, lu_solve

from .config import get_setting
from .core import code_vector, complement, signature_matrix
from .logging_utils import log_event, log_warning
from .models import (
    BlockFactorization,
    EpsilonUnderflowError,
    Factorization,
    FactorizationBlocks,
    FactorizationCheck,
    IndexSet,
    NotStableError,
    NumericalFailureError,
)
from .network import GlassNetwork
from .stability import is_stable_set


def _shrink_epsilon(epsilon: float, build: Callable[[float], np.ndarray],
                    accept: Callable[[np.ndarray], bool], what: str) -> Tuple[float, np.ndarray]:
    """Halve epsilon from the supplied value until the built matrix is accepted."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    floor = get_setting("epsilon_floor")
    start = epsilon
    while epsilon >= floor:
        y = build(epsilon)
        if accept(y):
            if epsilon != start:
                log_event("Factorization", f"Shrunk epsilon for {what}", {"from": start, "to": epsilon})
            return epsilon, y
        epsilon /= 2.0
    raise EpsilonUnderflowError(f"No epsilon above {floor} gives a valid Y for {what}")


def _solve_right(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Y X^-1 through an LU factorization of X^T (partial pivoting)."""
    condition = float(np.linalg.cond(x))
    if condition > get_setting("condition_warning"):
        log_warning("Factorization", "IllConditioned",
                    f"X has condition number {condition:.3e}", {"shape": list(x.shape)})
    try:
        lu = lu_factor(x.T, check_finite=True)
    except (LinAlgError, ValueError) as e:
        raise NumericalFailureError(f"LU factorization of X failed: {e}")
    return lu_solve(lu, y.T).T


def _require_stable(net: GlassNetwork, a: IndexSet) -> None:
    report = is_stable_set(net, a)
    if not report.is_stable:
        raise NotStableError(f"{a} is not a stable set (margin {report.margin:.6g}); no factorization exists")


def factorize(net: GlassNetwork, a: IndexSet, epsilon: Optional[float] = None) -> Factorization:
    """Build X and Y for a stable set, shrinking epsilon until Y > 0."""
    _require_stable(net, a)
    epsilon = get_setting("default_epsilon") if epsilon is None else float(epsilon)
    p = code_vector(a)
    signed_w = signature_matrix(a) @ net.w
    y_vector = signed_w @ p

    epsilon, y = _shrink_epsilon(
        epsilon,
        lambda eps: np.outer(y_vector, np.ones(net.n)) + eps * signed_w,
        lambda m: bool(np.all(m > 0.0)),
        f"set {a}",
    )
    x = np.outer(p, np.ones(net.n)) + epsilon * np.eye(net.n)
    return Factorization(x, y, epsilon, a)


def _block(rows: IndexSet, columns: IndexSet, block: np.ndarray, epsilon: float,
           positive: bool) -> BlockFactorization:
    k = block.shape[1]
    row_sums = block @ np.ones(k)
    sign = 1.0 if positive else -1.0
    epsilon, y = _shrink_epsilon(
        epsilon,
        lambda eps: np.outer(row_sums, np.ones(k)) + eps * block,
        lambda m: bool(np.all(sign * m > 0.0)),
        f"block rows {rows}",
    )
    x = np.ones((k, k)) + epsilon * np.eye(k)
    return BlockFactorization(rows, columns, block.copy(), x, y, epsilon)


def factorize_blocks(net: GlassNetwork, a: IndexSet, epsilon: Optional[float] = None) -> FactorizationBlocks:
    """
    Blockwise form: W[a] = Y_a X_a^-1 with Y_a positive and
    W[a^c, a] = Y_c X_c^-1 with Y_c negative, both with x = 1.
    """
    _require_stable(net, a)
    epsilon = get_setting("default_epsilon") if epsilon is None else float(epsilon)
    inside = a.indices()
    rest = complement(a)

    inner = _block(a, a, net.w[np.ix_(inside, inside)], epsilon, positive=True)
    if rest.is_empty():
        return FactorizationBlocks(inner, None, outer_omitted=True)
    outer = _block(rest, a, net.w[np.ix_(rest.indices(), inside)], epsilon, positive=False)
    return FactorizationBlocks(inner, outer)


def reconstruct(f: Factorization) -> np.ndarray:
    """S_a Y X^-1."""
    return signature_matrix(f.target_set) @ _solve_right(f.y, f.x)


def verify_factorization(f: Factorization, net: GlassNetwork) -> FactorizationCheck:
    """Check every factorization property; failures are listed, never raised."""
    violations = []
    a = f.target_set
    tolerance = get_setting("reconstruction_tolerance")

    if np.any(f.x < 0.0):
        violations.append("X not nonnegative")
    if not np.all(f.y > 0.0):
        violations.append("Y not positive")

    try:
        rebuilt = reconstruct(f)
    except NumericalFailureError as e:
        return FactorizationCheck(False, violations + [f"X not invertible: {e}"], float("inf"))

    residual = float(np.max(np.abs(rebuilt - net.w)))
    if residual > tolerance:
        violations.append(f"reconstruction tolerance {tolerance} exceeded (residual {residual:.3e})")

    p = code_vector(a)
    direction = np.linalg.solve(f.x, p)
    if np.any(direction < -tolerance) or not np.any(direction > tolerance):
        violations.append("X^-1 p not seminonnegative")

    drive = signature_matrix(a) @ rebuilt @ p
    if not np.all(drive > 0.0):
        violations.append("S Y X^-1 p not positive")

    if violations:
        log_warning("Factorization", "VerificationFailed", f"Factorization of {a} failed checks",
                    {"violations": violations})
    return FactorizationCheck(not violations, violations, residual)


def verify_blocks(blocks: FactorizationBlocks) -> FactorizationCheck:
    """Reconstruction and sign checks for the blockwise form."""
    violations = []
    tolerance = get_setting("reconstruction_tolerance")
    residual = 0.0
    parts = [(blocks.inner, 1.0)] + ([(blocks.outer, -1.0)] if blocks.outer is not None else [])
    for part, sign in parts:
        if not np.all(sign * part.y > 0.0):
            violations.append(f"Y for rows {part.rows} not {'positive' if sign > 0 else 'negative'}")
        part_residual = float(np.max(np.abs(_solve_right(part.y, part.x) - part.block)))
        residual = max(residual, part_residual)
        if part_residual > tolerance:
            violations.append(f"block rows {part.rows} exceed reconstruction tolerance {tolerance}")
    return FactorizationCheck(not violations, violations, residual)


def eigen_check(f: Factorization) -> Dict[str, float]:
    """
    Residuals of X p_a = (k + eps) p_a and X z = eps z for z orthogonal to 1
    and supported in a.
    """
    a = f.target_set
    p = code_vector(a)
    k = a.size()
    code_residual = float(np.max(np.abs(f.x @ p - (k + f.epsilon) * p)))

    members = a.indices()
    orthogonal_residual = 0.0
    for j in members[1:]:
        z = np.zeros(a.n)
        z[members[0]] = -1.0
        z[j] = 1.0
        orthogonal_residual = max(orthogonal_residual, float(np.max(np.abs(f.x @ z - f.epsilon * z))))
    return {"code": code_residual, "orthogonal": orthogonal_residual}
