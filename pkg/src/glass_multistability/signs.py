# glass_multistability/signs.py

"""
Qualitative (sign-pattern) analysis of stable sets.

A sign pattern S allows a set a to be stable when some W with sign(W) = S
makes a stable, and requires it (sign stability) when every such W does.
This module also carries the excitatory/inhibitory lower bounds implied by
stable families and the number of row signatures each family leaves allowed,
in closed form and by direct enumeration.
"""

import itertools
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import get_setting
from .core import all_subsets, signature_vector
from .logging_utils import log_event, log_warning
from .models import (
    CountMode,
    DimensionMismatchError,
    EIBounds,
    EnumerationTooLargeError,
    FamilyKind,
    FamilyShapeError,
    IndexSet,
    InvalidSetError,
    SignPattern,
    StableFamily,
    WeightMatrix,
)

# --- Patterns ---

def sign_pattern(w: Union[WeightMatrix, np.ndarray, Sequence[Sequence[float]]]) -> SignPattern:
    """The unique S with W = W+ o S for an entrywise positive W+."""
    array = w.w if isinstance(w, WeightMatrix) else np.asarray(w, dtype=float)
    return SignPattern(np.sign(array).astype(np.int8))


def _require_nonempty(s: SignPattern, a: IndexSet) -> None:
    if a.n != s.n:
        raise DimensionMismatchError(f"Set lives in dimension {a.n}, pattern in {s.n}")
    if a.is_empty():
        raise InvalidSetError("Sign conditions are only defined for nonempty sets")


def allows_stable(s: SignPattern, a: IndexSet) -> bool:
    """
    True iff every row i has some column j in a with s_ij = s_a^i, i.e.
    S_a S P_a has a positive entry on every row.
    """
    _require_nonempty(s, a)
    signed = signature_vector(a)[:, None] * s.s[:, a.indices()]
    return bool(np.all(np.any(signed > 0, axis=1)))


def is_sign_stable(s: SignPattern, a: IndexSet) -> bool:
    """True iff S_a S P_a is row positive: nonnegative with a positive entry on each row."""
    _require_nonempty(s, a)
    signed = signature_vector(a)[:, None] * s.s[:, a.indices()]
    return bool(np.all(signed >= 0) and np.all(np.any(signed > 0, axis=1)))


def requires_minimal_stability(s: SignPattern, a: IndexSet) -> bool:
    """A set is required to be minimally stable exactly when it is sign stable."""
    return is_sign_stable(s, a)


def sign_stable_sets(s: SignPattern) -> List[IndexSet]:
    """Every nonempty set the pattern requires to be stable."""
    return [a for a in all_subsets(s.n) if not a.is_empty() and is_sign_stable(s, a)]


# --- Families ---

def parse_family(n: int, text: str) -> StableFamily:
    """Parse "nested:1;1,2" (kind prefix, semicolon-separated 1-based sets)."""
    kind_text, sep, body = text.partition(":")
    if not sep:
        raise FamilyShapeError(f"Family {text!r} needs a kind prefix, e.g. 'disjoint:1;2'")
    try:
        kind = FamilyKind(kind_text.strip().lower())
    except ValueError:
        raise FamilyShapeError(f"Unknown family kind {kind_text!r}; use single, disjoint or nested")
    sets = tuple(IndexSet.parse(n, part) for part in body.split(";"))
    return StableFamily(kind, sets)


def validate_family(fam: StableFamily, clamped: Optional[int] = None) -> Tuple[IndexSet, ...]:
    """
    Check the family's shape and return its members with the clamped unit
    removed (unchanged when clamped is None). With a clamped input unit every
    member must contain it, and disjointness/nesting refer to the free units.
    """
    if not fam.sets:
        raise FamilyShapeError("A family needs at least one set")
    n = fam.sets[0].n
    if any(a.n != n for a in fam.sets):
        raise FamilyShapeError("Family members live in different dimensions")
    if any(a.is_empty() for a in fam.sets):
        raise FamilyShapeError("Family members must be nonempty")

    reduced = fam.sets
    if clamped is not None:
        if any(clamped not in a for a in fam.sets):
            raise FamilyShapeError(f"With embedded input every member must contain the clamped unit {clamped}")
        unit = IndexSet.from_members(n, [clamped])
        reduced = tuple(a.difference(unit) for a in fam.sets)

    if fam.kind is FamilyKind.SINGLE and len(fam.sets) != 1:
        raise FamilyShapeError(f"A single-set family has exactly one member, got {len(fam.sets)}")
    if fam.kind is FamilyKind.DISJOINT:
        for first, second in itertools.combinations(reduced, 2):
            if not first.isdisjoint(second):
                raise FamilyShapeError(f"Sets {first} and {second} overlap in a disjoint family")
    if fam.kind is FamilyKind.NESTED:
        for smaller, larger in zip(reduced, reduced[1:]):
            if not smaller.issubset(larger) or smaller == larger:
                raise FamilyShapeError(f"Nested family needs strict inclusion, got {smaller} then {larger}")
    return reduced


def allows_family(s: SignPattern, fam: StableFamily) -> bool:
    """Whether the pattern allows every member of the family to be stable simultaneously."""
    validate_family(fam)
    if fam.n != s.n:
        raise DimensionMismatchError(f"Family lives in dimension {fam.n}, pattern in {s.n}")
    if fam.kind is not FamilyKind.NESTED:
        return all(allows_stable(s, a) for a in fam.sets)

    if not allows_stable(s, fam.sets[0]):
        return False
    for previous, current in zip(fam.sets, fam.sets[1:]):
        columns = current.indices()
        for i in current.difference(previous):
            if not np.any(s.s[i - 1, columns] == 1):
                return False
    return True


def ei_bounds(fam: StableFamily, n: int) -> EIBounds:
    """Lower bounds on excitatory and inhibitory connections implied by a stable family."""
    validate_family(fam)
    if fam.n != n:
        raise DimensionMismatchError(f"Family lives in dimension {fam.n}, expected {n}")
    sizes = fam.sizes
    if fam.kind is FamilyKind.SINGLE:
        return EIBounds(sizes[0], n - sizes[0])
    if fam.kind is FamilyKind.DISJOINT:
        return EIBounds(sum(sizes), n * len(sizes) - sum(sizes))
    return EIBounds(sizes[-1], n - sizes[0])


# --- Witness constructions ---

def witness_matrix(s: SignPattern, a: IndexSet) -> np.ndarray:
    """
    A matrix in the sign class of s making a stable whenever s allows it:
    entries carrying the required sign s_a^i in the a-columns get magnitude n,
    every other nonzero entry gets 1/(2n).
    """
    _require_nonempty(s, a)
    n = s.n
    magnitude = np.full((n, n), 1.0 / (2 * n))
    sig = signature_vector(a)
    for j in a.indices():
        witnesses = s.s[:, j] * sig > 0
        magnitude[witnesses, j] = float(n)
    return magnitude * s.s


def adversarial_matrix(s: SignPattern, a: IndexSet) -> Optional[np.ndarray]:
    """
    A matrix in the sign class of s for which a is not stable, or None when a
    is sign stable. Mass is loaded on a wrong-signed entry in the a-columns so
    that it outweighs the rest of its row; a row with only zeros in the
    a-columns fails for every magnitude.
    """
    if is_sign_stable(s, a):
        return None
    magnitude = np.ones((s.n, s.n))
    signed = signature_vector(a)[:, None] * s.s[:, a.indices()]
    for row in range(s.n):
        wrong = np.flatnonzero(signed[row] < 0)
        if wrong.size:
            magnitude[row, a.indices()[wrong[0]]] = float(a.size())
            break
    return magnitude * s.s


# --- Row-signature counts ---

def _count_geometry(fam: StableFamily, n: int, mode: CountMode) -> Tuple[int, Tuple[IndexSet, ...]]:
    """Dimension of the free row and the family members restricted to it."""
    if fam.sets and fam.n != n:
        raise DimensionMismatchError(f"Family lives in dimension {fam.n}, expected {n}")
    if mode is CountMode.NONVANISHING_INPUT:
        if n < 2:
            raise DimensionMismatchError("Embedded input needs at least two units")
        return n - 1, validate_family(fam, clamped=n)
    return n, validate_family(fam)


def _check_row(row: int, free: int) -> None:
    if not 1 <= row <= free:
        raise DimensionMismatchError(f"Row {row} outside 1..{free}")


def count_allowed_row_signatures(fam: StableFamily, n: int, row: int,
                                 mode: CountMode = CountMode.UNCONSTRAINED) -> int:
    """
    Number of sign configurations of row `row` compatible with the family being
    stable, from the closed-form counting formulas.

    Unconstrained rows range over {-,0,+}^n. With vanishing input zero weights
    are excluded, leaving {-,+}^n. With embedded input the row ranges over the
    n-1 free columns and rows 1..n-1 are counted. All formulas are evaluated in
    exact rational arithmetic; the embedded-input nested formula is used
    exactly as published even where it disagrees with enumeration (see
    formula_discrepancies).
    """
    free, _ = _count_geometry(fam, n, mode)
    _check_row(row, free)
    sizes = fam.sizes
    nested_terms = [
        (current.size(), 1 if row in current.difference(previous) else 0)
        for previous, current in zip(fam.sets, fam.sets[1:])
    ] if fam.kind is FamilyKind.NESTED else []

    if mode is CountMode.UNCONSTRAINED:
        total = Fraction(3) ** n
        if fam.kind is FamilyKind.SINGLE:
            value = total * (1 - Fraction(2, 3) ** sizes[0])
        elif fam.kind is FamilyKind.DISJOINT:
            value = total
            for k in sizes:
                value *= 1 - Fraction(2, 3) ** k
        else:
            k1 = sizes[0]
            correction = sum((1 - Fraction(1, 2 ** k1)) * Fraction(2, 3) ** k * p for k, p in nested_terms)
            value = total * (1 - Fraction(2, 3) ** k1 - correction)

    elif mode is CountMode.VANISHING_INPUT:
        total = Fraction(2) ** n
        if fam.kind is FamilyKind.SINGLE:
            value = total * (1 - Fraction(1, 2) ** sizes[0])
        elif fam.kind is FamilyKind.DISJOINT:
            value = total
            for k in sizes:
                value *= 1 - Fraction(1, 2) ** k
        else:
            correction = sum(Fraction(1, 2) ** k * p for k, p in nested_terms)
            value = total * (1 - Fraction(1, 2) ** sizes[0] - correction)

    else:
        total = Fraction(3) ** (n - 1)
        if fam.kind is FamilyKind.SINGLE:
            value = total * (1 - Fraction(2, 3) ** (sizes[0] - 1))
        elif fam.kind is FamilyKind.DISJOINT:
            value = total
            for k in sizes:
                value *= 1 - Fraction(2, 3) ** (k - 1)
        else:
            correction = sum((1 - Fraction(1, 2 ** (k - 1))) * Fraction(2, 3) ** (k - 1) * p
                             for k, p in nested_terms)
            value = total * (1 - Fraction(2, 3) ** (sizes[0] - 1) - correction)

    if value.denominator != 1:
        raise ArithmeticError(f"Counting formula produced a non-integer {value} for {fam}")
    if value < 0:
        log_warning("Signs", "NegativeCount",
                    f"Published formula gives a negative count for {fam}, row {row}, mode {mode.value}",
                    {"value": int(value)})
    return int(value)


def brute_force_row_signatures(fam: StableFamily, n: int, row: int,
                               mode: CountMode = CountMode.UNCONSTRAINED) -> int:
    """
    Count the allowed row signatures by enumeration: a signature is forbidden
    when, for some member a, none of its entries in the a-columns carries the
    sign s_a^row.

    With embedded input only the n-1 free columns are enumerated. The clamped
    column holds the fixed input weight mu_row, which is not part of the
    signature and is never credited with the required sign: each member is
    reduced to its free columns, so a member that is the clamped unit alone
    forbids every signature. This is the same reading the closed form encodes
    with its k-1 exponents, so for such members the two agree by construction.
    """
    free, reduced = _count_geometry(fam, n, mode)
    _check_row(row, free)
    cap = get_setting("signature_cap")
    if free > cap:
        raise EnumerationTooLargeError("Row-signature enumeration", free, cap)

    values = (-1, 1) if mode is CountMode.VANISHING_INPUT else (-1, 0, 1)
    rows = np.array(list(itertools.product(values, repeat=free)), dtype=np.int8).reshape(-1, free)
    allowed = np.ones(rows.shape[0], dtype=bool)
    for full, members in zip(fam.sets, reduced):
        required_sign = 1 if row in full else -1
        columns = members.indices()
        if columns.size == 0:
            allowed[:] = False
            break
        allowed &= np.any(rows[:, columns] == required_sign, axis=1)
    return int(np.count_nonzero(allowed))


def counted_rows(n: int, mode: CountMode) -> range:
    """Rows the counts refer to (the clamped row is fixed with embedded input)."""
    return range(1, n) if mode is CountMode.NONVANISHING_INPUT else range(1, n + 1)


def count_allowed_sign_patterns(fam: StableFamily, n: int,
                                mode: CountMode = CountMode.UNCONSTRAINED) -> int:
    """Allowed sign patterns: rows are independent, so the per-row counts multiply."""
    total = 1
    for row in counted_rows(n, mode):
        total *= count_allowed_row_signatures(fam, n, row, mode)
    return total


def formula_discrepancies(fam: StableFamily, n: int,
                          mode: CountMode = CountMode.UNCONSTRAINED) -> List[Dict[str, int]]:
    """Rows where the closed-form count and the enumeration disagree."""
    found = []
    for row in counted_rows(n, mode):
        formula = count_allowed_row_signatures(fam, n, row, mode)
        enumerated = brute_force_row_signatures(fam, n, row, mode)
        if formula != enumerated:
            found.append({"row": row, "formula": formula, "brute_force": enumerated})
    if found:
        log_warning("Signs", "FormulaDiscrepancy",
                    f"Counting formula disagrees with enumeration for {fam} ({mode.value})",
                    {"rows": found})
    return found


# --- Curves ---

def curve_family(kind: FamilyKind, n: int, k: int, sets: int = 2, step: int = 1) -> StableFamily:
    """
    The family plotted at abscissa k: one set {1..k}; `sets` disjoint blocks of
    size k; or a nested chain of sizes 1, 1+step, ... ending at k.
    """
    if kind is FamilyKind.SINGLE:
        return StableFamily(kind, (IndexSet.from_members(n, range(1, k + 1)),))
    if kind is FamilyKind.DISJOINT:
        blocks = tuple(IndexSet.from_members(n, range(b * k + 1, (b + 1) * k + 1)) for b in range(sets))
        return StableFamily(kind, blocks)
    sizes = list(range(1, k + 1, step))
    if sizes[-1] != k:
        sizes.append(k)
    return StableFamily(kind, tuple(IndexSet.from_members(n, range(1, size + 1)) for size in sizes))


def bound_curves(kind: FamilyKind, n: int, sets: int = 2, step: int = 1,
                 mode: CountMode = CountMode.UNCONSTRAINED) -> List[Dict[str, object]]:
    """
    Rows (k, E_bound, I_bound, allowed_fraction) for k = 1.. the largest
    admissible size; allowed_fraction is the mean over rows of the allowed row
    signatures divided by all row signatures.
    """
    if mode is CountMode.NONVANISHING_INPUT:
        raise ValueError("Curves are tabulated for networks without embedded input")
    if sets < 1 or step < 1:
        raise ValueError("sets and step must be positive")
    largest = n // sets if kind is FamilyKind.DISJOINT else n
    base = 2 if mode is CountMode.VANISHING_INPUT else 3

    curve = []
    for k in range(1, largest + 1):
        fam = curve_family(kind, n, k, sets, step)
        bounds = ei_bounds(fam, n)
        counts = [count_allowed_row_signatures(fam, n, row, mode) for row in range(1, n + 1)]
        fraction = Fraction(sum(counts), n * base ** n)
        curve.append({
            "k": k,
            "E_bound": bounds.min_excitatory,
            "I_bound": bounds.min_inhibitory,
            "allowed_fraction": fraction,
        })
    log_event("Signs", f"Tabulated {kind.value} bound curve", {"n": n, "points": len(curve), "mode": mode.value})
    return curve
