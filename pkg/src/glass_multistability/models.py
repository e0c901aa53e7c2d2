from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

# --- Errors ---

class GlassNetworkError(Exception):
    """Base class for every error raised by the toolkit."""


class EnumerationTooLargeError(GlassNetworkError, ValueError):
    def __init__(self, what: str, n: int, cap: int):
        super().__init__(f"{what} for n={n} exceeds the enumeration cap of {cap}")
        self.n = n
        self.cap = cap


class DimensionMismatchError(GlassNetworkError, ValueError):
    pass


class ConstraintViolationError(GlassNetworkError, ValueError):
    def __init__(self, violations: Sequence["IndexSet"]):
        listed = ", ".join(str(v) for v in violations)
        super().__init__(f"Output constraint violated: W·p vanishes for {listed}")
        self.violations = list(violations)


class InvalidSetError(GlassNetworkError, ValueError):
    pass


class NetworkFormatError(GlassNetworkError, ValueError):
    """Malformed network file; line/column are set for JSON syntax errors."""
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line
        self.column = column


class FamilyShapeError(GlassNetworkError, ValueError):
    pass


class NotStableError(GlassNetworkError, ValueError):
    pass


class EpsilonUnderflowError(GlassNetworkError, ArithmeticError):
    pass


class NumericalFailureError(GlassNetworkError, ArithmeticError):
    pass


class InternalConsistencyError(GlassNetworkError, RuntimeError):
    """A theorem predicate disagreed with direct recomputation: always a bug."""


# --- Enums ---

class InputMode(Enum):
    VANISHING = "Vanishing"
    EMBEDDED_NONVANISHING = "EmbeddedNonvanishing"


class Verdict(Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    ORIGIN_CANDIDATE = "OriginCandidate"


class FamilyKind(Enum):
    SINGLE = "single"
    DISJOINT = "disjoint"
    NESTED = "nested"


class CountMode(Enum):
    UNCONSTRAINED = "unconstrained"
    VANISHING_INPUT = "vanishing"
    NONVANISHING_INPUT = "nonvanishing"


class Termination(Enum):
    CONVERGED = "ConvergedToFixedPoint"
    MAX_SWITCHES = "MaxSwitches"
    MAX_TIME = "MaxTime"
    CHATTER = "ChatterDetected"


# --- Index sets and codes ---

@dataclass(frozen=True)
class IndexSet:
    """
    A subset of [n] = {1, ..., n}, stored as a bitmask (bit i-1 <-> unit i).
    Members are always reported 1-based and ascending.
    """
    n: int
    mask: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InvalidSetError(f"Dimension must be a positive integer, got {self.n!r}")
        if self.mask < 0 or self.mask >> self.n:
            raise InvalidSetError(f"Mask {self.mask:#b} has bits outside [1..{self.n}]")

    @classmethod
    def from_members(cls, n: int, members: Sequence[int]) -> "IndexSet":
        mask = 0
        for i in members:
            if not isinstance(i, (int, np.integer)) or not 1 <= i <= n:
                raise InvalidSetError(f"Index {i!r} outside 1..{n}")
            bit = 1 << (int(i) - 1)
            if mask & bit:
                raise InvalidSetError(f"Duplicate index {i} in {list(members)}")
            mask |= bit
        return cls(n, mask)

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "IndexSet":
        return cls(n, mask)

    @classmethod
    def full(cls, n: int) -> "IndexSet":
        return cls(n, (1 << n) - 1)

    @classmethod
    def empty(cls, n: int) -> "IndexSet":
        return cls(n, 0)

    @classmethod
    def parse(cls, n: int, text: str) -> "IndexSet":
        """Parse "1,3" (1-based, comma separated). "", "{}" and "-" denote the empty set."""
        cleaned = text.strip().strip("{}").strip()
        if cleaned in ("", "-"):
            return cls.empty(n)
        try:
            members = [int(part) for part in cleaned.split(",")]
        except ValueError:
            raise InvalidSetError(f"Cannot parse set literal {text!r}; expected e.g. '1,3'")
        return cls.from_members(n, members)

    @property
    def members(self) -> Tuple[int, ...]:
        return tuple(i + 1 for i in range(self.n) if self.mask >> i & 1)

    def size(self) -> int:
        return bin(self.mask).count("1")

    def is_empty(self) -> bool:
        return self.mask == 0

    def __contains__(self, i: int) -> bool:
        return 1 <= i <= self.n and bool(self.mask >> (i - 1) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __len__(self) -> int:
        return self.size()

    def _check_same_n(self, other: "IndexSet") -> None:
        if other.n != self.n:
            raise DimensionMismatchError(f"Sets live in different dimensions ({self.n} vs {other.n})")

    def union(self, other: "IndexSet") -> "IndexSet":
        self._check_same_n(other)
        return IndexSet(self.n, self.mask | other.mask)

    def intersection(self, other: "IndexSet") -> "IndexSet":
        self._check_same_n(other)
        return IndexSet(self.n, self.mask & other.mask)

    def difference(self, other: "IndexSet") -> "IndexSet":
        self._check_same_n(other)
        return IndexSet(self.n, self.mask & ~other.mask)

    def issubset(self, other: "IndexSet") -> bool:
        self._check_same_n(other)
        return self.mask & ~other.mask == 0

    def isdisjoint(self, other: "IndexSet") -> bool:
        self._check_same_n(other)
        return self.mask & other.mask == 0

    def indices(self) -> np.ndarray:
        """0-based member positions, for numpy indexing."""
        return np.array([i - 1 for i in self.members], dtype=int)

    def sort_key(self) -> Tuple[int, int]:
        """Canonical order: ascending size, then ascending bitmask."""
        return (self.size(), self.mask)

    def to_list(self) -> List[int]:
        return list(self.members)

    def __str__(self) -> str:
        return "{" + ",".join(str(i) for i in self.members) + "}"


@dataclass(frozen=True)
class BinaryCode:
    n: int
    bits: Tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != self.n or any(b not in (0, 1) for b in self.bits):
            raise InvalidSetError(f"Binary code must be {self.n} entries over {{0,1}}: {self.bits}")

    def as_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=float)


@dataclass(frozen=True)
class Signature:
    n: int
    signs: Tuple[int, ...]

    def __post_init__(self):
        if len(self.signs) != self.n or any(s not in (-1, 1) for s in self.signs):
            raise InvalidSetError(f"Signature must be {self.n} entries over {{-1,+1}}: {self.signs}")

    def as_array(self) -> np.ndarray:
        return np.array(self.signs, dtype=float)


# --- Matrices ---

@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Square matrix of finite synaptic weights; row i is postsynaptic, column j presynaptic."""
    w: np.ndarray

    def __post_init__(self):
        array = np.array(self.w, dtype=float)
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] == 0:
            raise DimensionMismatchError(f"Weight matrix must be square and non-empty, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise DimensionMismatchError("Weight matrix contains non-finite entries")
        array.setflags(write=False)
        object.__setattr__(self, "w", array)

    @property
    def n(self) -> int:
        return self.w.shape[0]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, WeightMatrix) and np.array_equal(self.w, other.w)

    def __hash__(self) -> int:
        return hash(self.w.tobytes())


@dataclass(frozen=True, eq=False)
class SignPattern:
    """Entrywise signs of a weight matrix, values in {-1, 0, +1}."""
    s: np.ndarray

    def __post_init__(self):
        array = np.array(self.s, dtype=np.int8)
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] == 0:
            raise DimensionMismatchError(f"Sign pattern must be square and non-empty, got shape {array.shape}")
        if not np.all(np.isin(array, (-1, 0, 1))):
            raise DimensionMismatchError("Sign pattern entries must lie in {-1, 0, +1}")
        array.setflags(write=False)
        object.__setattr__(self, "s", array)

    @property
    def n(self) -> int:
        return self.s.shape[0]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SignPattern) and np.array_equal(self.s, other.s)

    def __hash__(self) -> int:
        return hash(self.s.tobytes())


# --- Families and bounds ---

@dataclass(frozen=True)
class StableFamily:
    kind: FamilyKind
    sets: Tuple[IndexSet, ...]

    @property
    def n(self) -> int:
        return self.sets[0].n

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(a.size() for a in self.sets)

    def __str__(self) -> str:
        return f"{self.kind.value}:" + ";".join(",".join(map(str, a.members)) for a in self.sets)


@dataclass(frozen=True)
class EIBounds:
    min_excitatory: int
    min_inhibitory: int


# --- Reports ---

@dataclass(frozen=True)
class StableSetReport:
    set: IndexSet
    verdict: Verdict
    attractor: Tuple[float, ...]
    margin: float
    boundary_candidate: bool = False  # some W_a^i == 0 exactly for i outside a
    near_degenerate: bool = False     # |margin| below the degeneracy threshold

    @property
    def is_stable(self) -> bool:
        return self.verdict is Verdict.STABLE


@dataclass(frozen=True)
class TrajectorySegment:
    part: IndexSet
    entry_state: Tuple[float, ...]
    attractor: Tuple[float, ...]
    duration: float
    exit_coordinate: Optional[int] = None  # 1-based coordinate that crossed zero


@dataclass
class Trajectory:
    segments: List[TrajectorySegment]
    termination: Termination
    final_state: Tuple[float, ...]
    elapsed: float
    converged_set: Optional[IndexSet] = None
    boundary_fixed_point: bool = False

    @property
    def switches(self) -> int:
        return sum(1 for seg in self.segments if seg.exit_coordinate is not None)


@dataclass(eq=False)
class Factorization:
    x: np.ndarray
    y: np.ndarray
    epsilon: float
    target_set: IndexSet

    @property
    def x_inverse_code(self) -> np.ndarray:
        """X^-1 p_a, the seminonnegativity check vector."""
        code = np.zeros(self.target_set.n)
        code[self.target_set.indices()] = 1.0
        return np.linalg.solve(self.x, code)


@dataclass(eq=False)
class BlockFactorization:
    """One block of the submatrix form: block = Y X^-1 with semipositivity vector 1."""
    rows: IndexSet
    columns: IndexSet
    block: np.ndarray
    x: np.ndarray
    y: np.ndarray
    epsilon: float


@dataclass(eq=False)
class FactorizationBlocks:
    inner: BlockFactorization                 # W[a]
    outer: Optional[BlockFactorization]       # W[a^c, a]; None when a^c is empty
    outer_omitted: bool = False


@dataclass
class FactorizationCheck:
    ok: bool
    violations: List[str] = field(default_factory=list)
    residual: float = 0.0

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Witness:
    index: int                     # 1-based row
    values: Tuple[float, ...]


@dataclass(frozen=True)
class CouplingVerdict:
    theorem: str
    holds: bool                    # value of the algebraic predicate
    recomputed: bool               # ground truth from direct stability checks
    witness: Optional[Witness] = None


@dataclass
class OracleReport:
    """Outcome of a batch of oracle comparisons."""
    scope: str
    seed: int
    checks: int = 0
    mismatches: List[Dict[str, Any]] = field(default_factory=list)
    diagnostics: List[Dict[str, Any]] = field(default_factory=list)
    sections: Dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def record(self, section: str) -> None:
        self.checks += 1
        self.sections[section] = self.sections.get(section, 0) + 1

    def merge(self, other: "OracleReport") -> None:
        self.checks += other.checks
        self.mismatches.extend(other.mismatches)
        self.diagnostics.extend(other.diagnostics)
        for key, value in other.sections.items():
            self.sections[key] = self.sections.get(key, 0) + value
