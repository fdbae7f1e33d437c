"""
Events and coevents over a finite sample space.

An event is an int bitmask: element i (1-based) is bit i-1. A coevent is a
Boolean function on events with phi(empty) = 0, held either as a truth table
indexed by event mask or as a GF(2) polynomial whose monomials are nonempty
element sets (also bitmasks).
"""
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple, Union

from config import Config
from qreality.errors import DimensionMismatch, EnumerationTooLarge, InputError

logger = logging.getLogger(__name__)

MAX_ENUMERATION_N = Config.MAX_ENUMERATION_N
# Structural class streams are capped by size, not by n
MAX_CLASS_STREAM = 1 << 16

CLASS_NAMES = ('classical', 'unital', 'additive', 'multiplicative', 'quadratic')


def popcount(mask: int) -> int:
    return bin(mask).count('1')


def elements_of(mask: int) -> List[int]:
    """Elements (1-based) contained in an event, ascending."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def event_of(elements: Iterable[int]) -> int:
    mask = 0
    for i in elements:
        mask |= 1 << (i - 1)
    return mask


def format_event(mask: int) -> str:
    return '{' + ','.join(str(i) for i in elements_of(mask)) + '}'


def parse_event(text: str, n: Optional[int] = None) -> int:
    """Parse ``{1,3}`` (spaces allowed, braces optional) into a mask."""
    body = text.strip()
    if body.startswith('{') and body.endswith('}'):
        body = body[1:-1]
    body = body.strip()
    if not body:
        return 0
    try:
        items = [int(part) for part in body.split(',')]
    except ValueError:
        raise InputError(f"bad event {text!r}")
    for i in items:
        if i < 1 or (n is not None and i > n):
            raise DimensionMismatch(f"element {i} of {text!r} is outside 1..{n}")
    return event_of(items)


def subsets(mask: int) -> Iterator[int]:
    """All submasks of ``mask``, empty set included, descending."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


@dataclass(frozen=True)
class SampleSpace:
    """Omega_n = {1..n}."""
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DimensionMismatch(f"sample space needs n >= 1, got {self.n}")

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @property
    def size(self) -> int:
        return 1 << self.n

    def elements(self) -> range:
        return range(1, self.n + 1)

    def events(self) -> range:
        return range(self.size)

    def nonempty_events(self) -> List[int]:
        """Nonempty events ordered by cardinality, then mask."""
        return sorted(range(1, self.size), key=lambda m: (popcount(m), m))

    def check_event(self, mask: int) -> int:
        if mask < 0 or mask > self.full:
            raise DimensionMismatch(f"event {mask:#b} is not a subset of Omega_{self.n}")
        return mask


def disjoint_triples(within: int) -> Iterator[Tuple[int, int, int]]:
    """Unordered triples of pairwise disjoint nonempty events inside ``within``."""
    for a in subsets(within):
        if not a:
            continue
        rest = within & ~a
        for b in subsets(rest):
            if not b or b <= a:
                continue
            for c in subsets(rest & ~b):
                if c and c > b:
                    yield a, b, c


def disjoint_pairs(within: int) -> Iterator[Tuple[int, int]]:
    """Unordered pairs of disjoint nonempty events inside ``within``."""
    for a in subsets(within):
        if not a:
            continue
        for b in subsets(within & ~a):
            if b and b > a:
                yield a, b


def set_partitions(mask: int) -> Iterator[List[int]]:
    """Partitions of an event into nonempty blocks."""
    items = elements_of(mask)
    if not items:
        yield []
        return

    def build(k, blocks):
        if k == len(items):
            yield list(blocks)
            return
        bit = 1 << (items[k] - 1)
        for i in range(len(blocks)):
            blocks[i] |= bit
            yield from build(k + 1, blocks)
            blocks[i] &= ~bit
        blocks.append(bit)
        yield from build(k + 1, blocks)
        blocks.pop()

    yield from build(0, [])


def _mobius(bits: List[int], n: int) -> List[int]:
    # Subset-sum transform mod 2; it is its own inverse.
    out = list(bits)
    for i in range(n):
        bit = 1 << i
        for mask in range(len(out)):
            if mask & bit:
                out[mask] ^= out[mask ^ bit]
    return out


@dataclass(frozen=True)
class CoeventTable:
    """Truth table: ``bits[mask]`` is phi(mask), ``bits[0] == 0``."""
    n: int
    bits: Tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != 1 << self.n:
            raise DimensionMismatch(
                f"truth table for n={self.n} needs {1 << self.n} entries, got {len(self.bits)}")
        if any(b not in (0, 1) for b in self.bits):
            raise InputError("truth table entries must be 0 or 1")
        if self.bits[0] != 0:
            raise InputError("a coevent must vanish on the empty set")

    @classmethod
    def from_index(cls, n: int, index: int) -> 'CoeventTable':
        """Table whose bit for event A (A >= 1) is bit A-1 of ``index``."""
        return cls(n, (0,) + tuple((index >> (a - 1)) & 1 for a in range(1, 1 << n)))

    @property
    def index(self) -> int:
        return sum(b << (a - 1) for a, b in enumerate(self.bits) if a)

    def __call__(self, event: int) -> int:
        return self.bits[event]

    def __xor__(self, other):
        other = as_table(other)
        _same_n(self, other)
        return CoeventTable(self.n, tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def __and__(self, other):
        other = as_table(other)
        _same_n(self, other)
        return CoeventTable(self.n, tuple(a & b for a, b in zip(self.bits, other.bits)))

    def __eq__(self, other):
        if isinstance(other, CoeventPoly):
            other = other.to_table()
        if not isinstance(other, CoeventTable):
            return NotImplemented
        return self.n == other.n and self.bits == other.bits

    def __hash__(self):
        return hash(('coevent', self.n, self.bits))

    def __str__(self):
        return str(table_to_poly(self))

    def to_table(self) -> 'CoeventTable':
        return self

    def to_poly(self) -> 'CoeventPoly':
        return table_to_poly(self)


@dataclass(frozen=True)
class CoeventPoly:
    """GF(2) polynomial in the evaluation maps; each monomial is a nonempty mask."""
    n: int
    monomials: FrozenSet[int]

    def __post_init__(self):
        full = (1 << self.n) - 1
        for m in self.monomials:
            if m == 0:
                raise InputError("the constant monomial is not a coevent")
            if m & ~full:
                raise DimensionMismatch(f"monomial {format_event(m)} is outside Omega_{self.n}")

    @classmethod
    def zero(cls, n: int) -> 'CoeventPoly':
        return cls(n, frozenset())

    @classmethod
    def one(cls, n: int) -> 'CoeventPoly':
        """The coevent equal to 1 on every nonempty event."""
        return cls(n, frozenset(range(1, 1 << n)))

    @classmethod
    def evaluation(cls, n: int, i: int) -> 'CoeventPoly':
        if not 1 <= i <= n:
            raise DimensionMismatch(f"w{i} is outside Omega_{n}")
        return cls(n, frozenset([1 << (i - 1)]))

    def __call__(self, event: int) -> int:
        return sum(1 for m in self.monomials if m & event == m) & 1

    @property
    def degree(self) -> int:
        return max((popcount(m) for m in self.monomials), default=0)

    def __xor__(self, other):
        other = as_poly(other)
        _same_n(self, other)
        return CoeventPoly(self.n, self.monomials ^ other.monomials)

    def __and__(self, other):
        other = as_poly(other)
        _same_n(self, other)
        result = set()
        for a in self.monomials:
            for b in other.monomials:
                result ^= {a | b}
        return CoeventPoly(self.n, frozenset(result))

    def __eq__(self, other):
        if isinstance(other, CoeventTable):
            return self.to_table() == other
        if not isinstance(other, CoeventPoly):
            return NotImplemented
        return self.n == other.n and self.monomials == other.monomials

    def __hash__(self):
        return hash(self.to_table())

    def sorted_monomials(self) -> List[int]:
        return sorted(self.monomials, key=lambda m: (popcount(m), elements_of(m)))

    def __str__(self):
        if not self.monomials:
            return '0'
        return ' + '.join('*'.join(f'w{i}' for i in elements_of(m))
                          for m in self.sorted_monomials())

    def to_table(self) -> CoeventTable:
        return poly_to_table(self)

    def to_poly(self) -> 'CoeventPoly':
        return self


Coevent = Union[CoeventTable, CoeventPoly]


def _same_n(a, b):
    if a.n != b.n:
        raise DimensionMismatch(f"coevents over Omega_{a.n} and Omega_{b.n} do not combine")


def as_table(phi: Coevent) -> CoeventTable:
    return phi.to_table()


def as_poly(phi: Coevent) -> CoeventPoly:
    return phi.to_poly()


def eval_coevent(phi: Coevent, event: int) -> int:
    """phi(A) for an event mask A."""
    if event < 0 or event >= 1 << phi.n:
        raise DimensionMismatch(f"event {event:#b} is outside Omega_{phi.n}")
    return phi(event)


def table_to_poly(table: CoeventTable) -> CoeventPoly:
    coeffs = _mobius(list(table.bits), table.n)
    return CoeventPoly(table.n, frozenset(m for m, c in enumerate(coeffs) if c))


def poly_to_table(poly: CoeventPoly) -> CoeventTable:
    coeffs = [0] * (1 << poly.n)
    for m in poly.monomials:
        coeffs[m] = 1
    return CoeventTable(poly.n, tuple(_mobius(coeffs, poly.n)))


def xor(phi: Coevent, psi: Coevent) -> Coevent:
    return phi ^ psi


def and_(phi: Coevent, psi: Coevent) -> Coevent:
    return phi & psi


@dataclass(frozen=True)
class CoeventClass:
    classical: bool
    unital: bool
    additive: bool
    multiplicative: bool
    quadratic: bool

    def as_dict(self) -> Dict[str, bool]:
        return {name: getattr(self, name) for name in CLASS_NAMES}

    def __str__(self):
        return ' '.join(f'{name}={int(getattr(self, name))}' for name in CLASS_NAMES)


def classify(phi: Coevent) -> CoeventClass:
    """Class flags read off the polynomial form."""
    poly = as_poly(phi)
    monos = poly.monomials
    additive = bool(monos) and all(popcount(m) == 1 for m in monos)
    multiplicative = len(monos) == 1
    return CoeventClass(
        classical=additive and multiplicative,
        unital=len(monos) % 2 == 1,
        additive=additive,
        multiplicative=multiplicative,
        quadratic=poly.degree <= 2,
    )


def classify_direct(phi: Coevent) -> CoeventClass:
    """Class flags from the defining identities, checked on every event."""
    table = as_table(phi)
    space = SampleSpace(table.n)
    nonzero = any(table.bits)

    h1 = table(space.full) == 1
    h2 = all(table(a | b) == table(a) ^ table(b) for a, b in disjoint_pairs(space.full))
    h3 = all(table(a & b) == table(a) & table(b)
             for a in space.events() for b in space.events())
    q4 = all(
        table(a | b | c) == (table(a | b) ^ table(a | c) ^ table(b | c)
                             ^ table(a) ^ table(b) ^ table(c))
        for a, b, c in disjoint_triples(space.full))
    return CoeventClass(
        classical=h1 and h2 and h3,
        unital=h1,
        additive=h2 and nonzero,
        multiplicative=h3 and nonzero,
        quadratic=q4,
    )


def check_eq21(phi: Coevent) -> bool:
    """
    Check the multi-block parity expansion on every event.

    For each event E and each partition of E into m >= 3 blocks,
    phi(E) must equal the XOR of phi over all block pairs, XOR'd with the
    XOR of phi over single blocks when m is odd. Holds exactly for
    quadratic coevents.
    """
    table = as_table(phi)
    for event in range(1, 1 << table.n):
        for blocks in set_partitions(event):
            m = len(blocks)
            if m < 3:
                continue
            acc = 0
            for a, b in combinations(blocks, 2):
                acc ^= table(a | b)
            if m % 2:
                for a in blocks:
                    acc ^= table(a)
            if acc != table(event):
                return False
    return True


def quadratic_from_values(n: int, singletons: Dict[int, int],
                          doubletons: Dict[Tuple[int, int], int]) -> CoeventPoly:
    """
    The unique quadratic coevent with prescribed singleton and doubleton values.

    Args:
        n: size of the sample space
        singletons: element -> phi({element})
        doubletons: (i, j) with i < j -> phi({i, j})

    Returns:
        CoeventPoly of degree at most 2
    """
    monos = set()
    for i in range(1, n + 1):
        if singletons.get(i, 0) & 1:
            monos.add(1 << (i - 1))
    for i, j in combinations(range(1, n + 1), 2):
        value = doubletons.get((i, j), doubletons.get((j, i), 0))
        if (value ^ singletons.get(i, 0) ^ singletons.get(j, 0)) & 1:
            monos.add((1 << (i - 1)) | (1 << (j - 1)))
    return CoeventPoly(n, frozenset(monos))


def _monomial_subsets(n: int, pool: List[int], odd_only: bool = False) -> Iterator[CoeventTable]:
    for k in range(1 << len(pool)):
        chosen = frozenset(pool[b] for b in range(len(pool)) if (k >> b) & 1)
        if odd_only and len(chosen) % 2 == 0:
            continue
        yield CoeventPoly(n, chosen).to_table()


def enumerate_coevents(n: int, class_filter: Optional[str] = None) -> Iterator[CoeventTable]:
    """
    Stream coevents over Omega_n in a fixed order.

    Without a filter the order is by table index. With a class filter the
    class is generated structurally from its monomials.

    Raises:
        EnumerationTooLarge: when the stream would exceed its cap
    """
    space = SampleSpace(n)
    singles = [1 << (i - 1) for i in space.elements()]
    if class_filter is None:
        if n > MAX_ENUMERATION_N:
            raise EnumerationTooLarge(
                f"full enumeration is limited to n <= {MAX_ENUMERATION_N}, got n={n}")
        for index in range(1 << (space.size - 1)):
            yield CoeventTable.from_index(n, index)
        return

    if class_filter == 'classical':
        for m in singles:
            yield CoeventPoly(n, frozenset([m])).to_table()
        return
    if class_filter == 'multiplicative':
        for m in space.nonempty_events():
            yield CoeventPoly(n, frozenset([m])).to_table()
        return
    if class_filter == 'additive':
        stream = _monomial_subsets(n, singles)
        next(stream)  # skip the zero coevent
        yield from stream
        return
    if class_filter == 'quadratic':
        pool = [m for m in space.nonempty_events() if popcount(m) <= 2]
        if 1 << len(pool) > MAX_CLASS_STREAM:
            raise EnumerationTooLarge(f"quadratic class at n={n} is too large to stream")
        yield from _monomial_subsets(n, pool)
        return
    if class_filter == 'unital':
        if n > MAX_ENUMERATION_N:
            raise EnumerationTooLarge(f"unital class at n={n} is too large to stream")
        yield from _monomial_subsets(n, space.nonempty_events(), odd_only=True)
        return
    raise InputError(f"unknown coevent class {class_filter!r}; expected one of {CLASS_NAMES}")
