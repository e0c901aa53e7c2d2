# glass_multistability/core.py

"""
Index-set algebra shared by every analysis: complements, binary codes,
signatures, their diagonal matrix forms and exhaustive subset enumeration.
"""

from typing import Iterator, Optional

import numpy as np

from .config import get_setting
from .models import BinaryCode, EnumerationTooLargeError, IndexSet, Signature


def complement(a: IndexSet) -> IndexSet:
    """[n] minus a."""
    return IndexSet(a.n, ((1 << a.n) - 1) & ~a.mask)


def code(a: IndexSet) -> BinaryCode:
    """The 0/1 indicator p_a of the active units."""
    return BinaryCode(a.n, tuple(a.mask >> i & 1 for i in range(a.n)))


def signature(a: IndexSet) -> Signature:
    """s_a = p_a - p_{a^c}: +1 on members, -1 elsewhere."""
    return Signature(a.n, tuple(1 if a.mask >> i & 1 else -1 for i in range(a.n)))


def code_vector(a: IndexSet) -> np.ndarray:
    return code(a).as_array()


def signature_vector(a: IndexSet) -> np.ndarray:
    return signature(a).as_array()


def projection_matrix(a: IndexSet) -> np.ndarray:
    """P_a = diag(p_a)."""
    return np.diag(code_vector(a))


def signature_matrix(a: IndexSet) -> np.ndarray:
    """S_a = diag(s_a); an involution."""
    return np.diag(signature_vector(a))


def check_enumeration_cap(n: int, cap: Optional[int] = None, what: str = "Subset enumeration") -> None:
    limit = get_setting("enumeration_cap") if cap is None else cap
    if n > limit:
        raise EnumerationTooLargeError(what, n, limit)


def all_subsets(n: int, cap: Optional[int] = None) -> Iterator[IndexSet]:
    """Yields all 2^n subsets of [n] once each, in ascending bitmask order."""
    if n < 1:
        raise ValueError(f"Dimension must be positive, got {n}")
    check_enumeration_cap(n, cap)
    for mask in range(1 << n):
        yield IndexSet(n, mask)


def subsets_of(a: IndexSet, proper: bool = False, nonempty: bool = False) -> Iterator[IndexSet]:
    """All subsets of a (ascending bitmask order), via the standard submask walk."""
    check_enumeration_cap(a.size())
    found = []
    sub = a.mask
    while True:
        found.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & a.mask
    for mask in reversed(found):
        if proper and mask == a.mask:
            continue
        if nonempty and mask == 0:
            continue
        yield IndexSet(a.n, mask)


def code_block(n: int, masks: np.ndarray) -> np.ndarray:
    """Rows are the binary codes of the given bitmasks (shape len(masks) x n)."""
    shifts = np.arange(n, dtype=np.int64)
    return ((masks[:, None].astype(np.int64) >> shifts) & 1).astype(float)


def mask_chunks(n: int, chunk: int = 1 << 14, required: int = 0) -> Iterator[np.ndarray]:
    """
    Ascending bitmasks of [n] in numpy chunks; with `required` set, only masks
    containing all of its bits are produced.
    """
    check_enumeration_cap(n)
    total = 1 << n
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        if required:
            masks = masks[(masks & required) == required]
        if masks.size:
            yield masks
