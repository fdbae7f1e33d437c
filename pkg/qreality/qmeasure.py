"""
q-measures: nonnegative, grade-2 additive set functions with mu(empty) = 0.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

from qreality.errors import (DimensionMismatch, InvalidDirac, NegativeExtension,
                             NegativeValue, NonzeroEmpty, NotGrade2Additive)
from qreality.logic import (Coevent, SampleSpace, disjoint_pairs, disjoint_triples,
                            elements_of, format_event, popcount)

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]


@dataclass(frozen=True)
class QMeasure:
    """Validated q-measure; ``values[mask]`` is mu(mask)."""
    n: int
    values: Tuple[Fraction, ...]

    def __call__(self, event: int) -> Fraction:
        return self.values[event]

    @property
    def total(self) -> Fraction:
        return self.values[-1]

    def is_zero(self) -> bool:
        return not any(self.values)

    def items(self):
        return enumerate(self.values)


def _grade2_defect(values: Sequence[Fraction], a: int, b: int, c: int) -> Fraction:
    return (values[a | b | c] - values[a | b] - values[a | c] - values[b | c]
            + values[a] + values[b] + values[c])


def _check_triples(values: Sequence[Fraction], full: int) -> Optional[Tuple[int, int, int]]:
    for a, b, c in disjoint_triples(full):
        if _grade2_defect(values, a, b, c) != 0:
            return a, b, c
    return None


def expansion_value(values: Sequence[Fraction], event: int) -> Fraction:
    """Sum of mu over element pairs in the event minus (m-2) times its singleton sum."""
    items = [1 << (i - 1) for i in elements_of(event)]
    pairs = sum((values[a | b] for a, b in combinations(items, 2)), Fraction(0))
    singles = sum((values[a] for a in items), Fraction(0))
    return pairs - (len(items) - 2) * singles


def _check_expansion(values: Sequence[Fraction], full: int) -> Optional[int]:
    for event in range(1, full + 1):
        if popcount(event) >= 3 and values[event] != expansion_value(values, event):
            return event
    return None


def satisfies_grade2(values: Sequence[Number]) -> bool:
    """Disjoint-triple form of grade-2 additivity."""
    values = [Fraction(v) for v in values]
    return _check_triples(values, len(values) - 1) is None


def satisfies_expansion(values: Sequence[Number]) -> bool:
    """Pair/singleton expansion form of grade-2 additivity."""
    values = [Fraction(v) for v in values]
    return _check_expansion(values, len(values) - 1) is None


def _table_from(values: Union[Mapping[int, Number], Sequence[Number]], n: Optional[int]):
    if isinstance(values, Mapping):
        if n is None:
            top = max(values, default=0)
            n = max(top.bit_length(), 1)
        table = [Fraction(0)] * (1 << n)
        for event, value in values.items():
            if event < 0 or event >= 1 << n:
                raise DimensionMismatch(f"event {format_event(event)} is outside Omega_{n}")
            table[event] = Fraction(value)
        missing = [format_event(e) for e in range(1, 1 << n) if e not in values]
        if missing:
            raise DimensionMismatch(f"measure has no value for {', '.join(missing)}")
        return n, table
    table = [Fraction(v) for v in values]
    size = len(table)
    if size < 2 or size & (size - 1):
        raise DimensionMismatch(f"a measure table needs 2^n entries, got {size}")
    if n is not None and size != 1 << n:
        raise DimensionMismatch(f"a measure on Omega_{n} needs {1 << n} entries, got {size}")
    return size.bit_length() - 1, table


def validate(values: Union[Mapping[int, Number], Sequence[Number]],
             n: Optional[int] = None) -> QMeasure:
    """
    Build a QMeasure after checking every defining condition.

    Args:
        values: event mask -> value, or a full table indexed by mask
        n: size of the sample space (inferred when omitted)

    Raises:
        NonzeroEmpty, NegativeValue, NotGrade2Additive
    """
    n, table = _table_from(values, n)
    if table[0] != 0:
        raise NonzeroEmpty(table[0])
    for event, value in enumerate(table):
        if value < 0:
            raise NegativeValue(format_event(event), value)
    full = (1 << n) - 1
    triple = _check_triples(table, full)
    if triple is not None:
        raise NotGrade2Additive(tuple(format_event(e) for e in triple))
    event = _check_expansion(table, full)
    if event is not None:
        raise NotGrade2Additive(
            (format_event(event),),
            f"mu({format_event(event)}) disagrees with its pair expansion")
    return QMeasure(n, tuple(table))


def extend_from_pairs(n: int, singletons: Mapping[int, Number],
                      doubletons: Mapping[Tuple[int, int], Number]) -> QMeasure:
    """
    The unique grade-2 additive extension of singleton and doubleton values.

    Raises:
        NegativeExtension: when some larger event would get a negative value
    """
    space = SampleSpace(n)
    table = [Fraction(0)] * space.size
    for i in space.elements():
        table[1 << (i - 1)] = Fraction(singletons.get(i, 0))
    for i, j in combinations(space.elements(), 2):
        value = doubletons.get((i, j), doubletons.get((j, i), 0))
        table[(1 << (i - 1)) | (1 << (j - 1))] = Fraction(value)
    for event in space.events():
        if popcount(event) >= 3:
            table[event] = expansion_value(table, event)
            if table[event] < 0:
                raise NegativeExtension(format_event(event), table[event])
    return validate(table, n)


@dataclass(frozen=True)
class RegularityReport:
    r1: bool
    r2: bool
    r1_witnesses: List[Tuple[int, int]] = field(default_factory=list)
    r2_witnesses: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def regular(self) -> bool:
        return self.r1 and self.r2


def is_regular(mu: QMeasure) -> RegularityReport:
    """
    Check both regularity conditions over disjoint event pairs.

    R1: mu(A) = 0 implies mu(A u B) = mu(B); witnesses are ordered (A, B).
    R2: mu(A u B) = 0 implies mu(A) = mu(B); witnesses are unordered.
    """
    full = (1 << mu.n) - 1
    r1, r2 = [], []
    for a, b in disjoint_pairs(full):
        for x, y in ((a, b), (b, a)):
            if mu(x) == 0 and mu(x | y) != mu(y):
                r1.append((x, y))
        if mu(a | b) == 0 and mu(a) != mu(b):
            r2.append((a, b))
    return RegularityReport(not r1, not r2, r1, r2)


def precluded_events(mu: QMeasure) -> FrozenSet[int]:
    """Events of measure zero, the empty set included."""
    return frozenset(event for event, value in mu.items() if value == 0)


def is_preclusive(phi: Coevent, mu: QMeasure) -> Tuple[bool, Optional[int]]:
    """
    Whether phi vanishes on every mu-precluded event.

    Returns:
        (True, None), or (False, first offending event mask)
    """
    if phi.n != mu.n:
        raise DimensionMismatch(f"coevent on Omega_{phi.n} against measure on Omega_{mu.n}")
    for event in sorted(precluded_events(mu)):
        if phi(event):
            return False, event
    return True, None


def dirac(a: Number, omega: int, n: int) -> QMeasure:
    """a times the Dirac measure at omega."""
    a = Fraction(a)
    if a <= 0:
        raise InvalidDirac(f"Dirac weight must be positive, got {a}")
    if not 1 <= omega <= n:
        raise DimensionMismatch(f"element {omega} is outside Omega_{n}")
    bit = 1 << (omega - 1)
    return validate([a if event & bit else Fraction(0) for event in range(1 << n)], n)


def zero_measure(n: int) -> QMeasure:
    return QMeasure(n, tuple(Fraction(0) for _ in range(1 << n)))
