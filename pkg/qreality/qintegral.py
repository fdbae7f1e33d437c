"""
Concrete q-integrals of nonnegative functions against a coevent.

The q-integral of f over phi is the layered sum over the distinct values
0 < a_1 < ... < a_k of f:  sum_j (a_j - a_{j-1}) * phi({f >= a_j}).
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Mapping, Sequence, Tuple, Union

from qreality.errors import DensityError, DimensionMismatch, NegativeDensity
from qreality.logic import Coevent, SampleSpace

Number = Union[int, Fraction]


class Mode(str, Enum):
    GEN1 = 'gen1'
    GEN2 = 'gen2'
    ACTUALIZE = 'actualize'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Density1:
    """f: Omega_n -> Q+, ``values[i-1]`` is f(i)."""
    values: Tuple[Fraction, ...]

    @classmethod
    def of(cls, values: Union[Mapping[int, Number], Sequence[Number]]) -> 'Density1':
        if isinstance(values, Mapping):
            n = max(values, default=0)
            missing = [i for i in range(1, n + 1) if i not in values]
            if missing:
                raise DensityError(f"density has no value for elements {missing}")
            values = [values[i] for i in range(1, n + 1)]
        return cls(tuple(Fraction(v) for v in values))

    @property
    def n(self) -> int:
        return len(self.values)

    def __call__(self, i: int) -> Fraction:
        return self.values[i - 1]

    def is_positive(self) -> bool:
        return all(v > 0 for v in self.values)


@dataclass(frozen=True)
class Density2:
    """Symmetric f: Omega_n x Omega_n -> Q+, keyed by (i, j) with i <= j."""
    n: int
    values: Tuple[Tuple[Tuple[int, int], Fraction], ...]

    @classmethod
    def of(cls, n: int, values: Mapping[Tuple[int, int], Number]) -> 'Density2':
        table: Dict[Tuple[int, int], Fraction] = {}
        for (i, j), v in values.items():
            key = (min(i, j), max(i, j))
            if not (1 <= key[0] and key[1] <= n):
                raise DimensionMismatch(f"density entry {(i, j)} is outside Omega_{n}")
            if key in table:
                raise DensityError(f"density entry {key} given twice")
            table[key] = Fraction(v)
        missing = [(i, j) for i in range(1, n + 1) for j in range(i, n + 1) if (i, j) not in table]
        if missing:
            raise DensityError(f"density has no value for {missing}")
        return cls(n, tuple(sorted(table.items())))

    def as_dict(self) -> Dict[Tuple[int, int], Fraction]:
        return dict(self.values)

    def __call__(self, i: int, j: int) -> Fraction:
        return self.as_dict()[(min(i, j), max(i, j))]

    def column(self, j: int) -> Density1:
        """f(., j) as a one-variable density."""
        table = self.as_dict()
        return Density1(tuple(table[(min(i, j), max(i, j))] for i in range(1, self.n + 1)))

    def is_positive(self) -> bool:
        return all(v > 0 for _, v in self.values)


Density = Union[Density1, Density2]


def _check_function(values: Sequence[Fraction], n: int):
    if len(values) != n:
        raise DimensionMismatch(f"function has {len(values)} values, coevent lives on Omega_{n}")
    for i, v in enumerate(values, start=1):
        if v < 0:
            raise NegativeDensity(f"f({i}) = {v} is negative")


def q_integral(f: Union[Density1, Sequence[Number]], phi: Coevent) -> Fraction:
    """Layered q-integral of f over the whole sample space."""
    values = f.values if isinstance(f, Density1) else tuple(Fraction(v) for v in f)
    _check_function(values, phi.n)
    total = Fraction(0)
    previous = Fraction(0)
    for level in sorted(set(v for v in values if v > 0)):
        above = 0
        for i, v in enumerate(values):
            if v >= level:
                above |= 1 << i
        if phi(above):
            total += level - previous
        previous = level
    return total


def q_integral_over(f: Union[Density1, Sequence[Number]], phi: Coevent, event: int) -> Fraction:
    """q-integral of f restricted to an event (f times its indicator)."""
    values = f.values if isinstance(f, Density1) else tuple(Fraction(v) for v in f)
    _check_function(values, phi.n)
    return q_integral([v if event >> i & 1 else Fraction(0) for i, v in enumerate(values)], phi)


def q_integral_riemann(f: Union[Density1, Sequence[Number]], phi: Coevent) -> Fraction:
    """The integral of lambda -> phi({f > lambda}) over [0, inf), summed between breakpoints."""
    values = f.values if isinstance(f, Density1) else tuple(Fraction(v) for v in f)
    _check_function(values, phi.n)
    breaks = [Fraction(0)] + sorted(set(v for v in values if v > 0))
    total = Fraction(0)
    for lo, hi in zip(breaks, breaks[1:]):
        mid = (lo + hi) / 2
        above = sum(1 << i for i, v in enumerate(values) if v > mid)
        total += (hi - lo) * phi(above)
    return total


def _inner(f2: Density2, phi: Coevent, event: int, targets: int) -> List[Fraction]:
    # g(w') for every w', zero outside ``targets``
    return [q_integral_over(f2.column(j), phi, event) if targets >> (j - 1) & 1 else Fraction(0)
            for j in range(1, f2.n + 1)]


def iterated_2gen(f2: Density2, phi: Coevent, event: int) -> Fraction:
    """Iterated integral with both the inner and the outer range restricted to the event."""
    return q_integral_over(_inner(f2, phi, event, event), phi, event)


def iterated_actualize(f2: Density2, phi: Coevent, event: int) -> Fraction:
    """Inner integral restricted to the event, outer integral over the whole space."""
    full = (1 << f2.n) - 1
    return q_integral(_inner(f2, phi, event, full), phi)


def induced_values(density: Density, phi: Coevent, mode: Mode) -> List[Fraction]:
    """
    The set function A -> value induced by a density under one of the modes.

    Args:
        density: Density1 for ``gen1``, Density2 otherwise
        phi: the coevent
        mode: ``gen1``, ``gen2`` or ``actualize``

    Returns:
        values indexed by event mask
    """
    if density.n != phi.n:
        raise DimensionMismatch(f"density on Omega_{density.n} against coevent on Omega_{phi.n}")
    events = SampleSpace(phi.n).events()
    if mode == Mode.GEN1:
        if not isinstance(density, Density1):
            raise DensityError("1-generation needs a one-variable density")
        return [q_integral_over(density, phi, a) for a in events]
    if not isinstance(density, Density2):
        raise DensityError(f"{mode} needs a two-variable density")
    if mode == Mode.GEN2:
        return [iterated_2gen(density, phi, a) for a in events]
    if mode == Mode.ACTUALIZE:
        return [iterated_actualize(density, phi, a) for a in events]
    raise DensityError(f"unknown mode {mode!r}")


def product_density(f: Density1, scale: Number) -> Density2:
    """g(i, j) = f(i) f(j) / scale."""
    scale = Fraction(scale)
    if scale <= 0:
        raise DensityError(f"product density needs a positive scale, got {scale}")
    n = f.n
    return Density2.of(n, {(i, j): f(i) * f(j) / scale
                           for i in range(1, n + 1) for j in range(i, n + 1)})
