"""
Exact feasibility of linear systems over the rationals.

Systems are conjunctions of ``expr = 0``, ``expr >= 0`` and ``expr > 0``.
Strict rows share one slack t: each ``e > 0`` becomes ``e - t >= 0`` with
``t <= 1`` and t is maximized; the system is feasible iff the optimum is
positive. The simplex runs on Fractions with Bland's rule.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from qreality.errors import SolverError

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]


@dataclass(frozen=True, order=True)
class VarId:
    """Unknown in a branch system: a density entry or a measure value."""
    kind: str
    index: Tuple[int, ...]

    @classmethod
    def density1(cls, i: int) -> 'VarId':
        return cls('f', (i,))

    @classmethod
    def density2(cls, i: int, j: int) -> 'VarId':
        return cls('f2', (min(i, j), max(i, j)))

    @classmethod
    def measure(cls, event: int) -> 'VarId':
        return cls('mu', (event,))

    def __str__(self):
        if self.kind == 'mu':
            bits = [str(k + 1) for k in range(self.index[0].bit_length()) if self.index[0] >> k & 1]
            return 'mu({' + ','.join(bits) + '})'
        if self.kind in ('f', 'f2'):
            return 'f(' + ','.join(str(i) for i in self.index) + ')'
        return self.kind + ''.join(str(i) for i in self.index)


Point = Dict[VarId, Fraction]


class LinExpr:
    """Immutable rational linear expression: sum of coef * var plus a constant."""
    __slots__ = ('terms', 'constant', '_hash')

    def __init__(self, terms: Optional[Mapping[VarId, Number]] = None, constant: Number = 0):
        clean = {}
        for var, coef in (terms or {}).items():
            coef = Fraction(coef)
            if coef:
                clean[var] = coef
        self.terms: Tuple[Tuple[VarId, Fraction], ...] = tuple(sorted(clean.items()))
        self.constant = Fraction(constant)
        self._hash = None

    @classmethod
    def var(cls, var: VarId) -> 'LinExpr':
        return cls({var: 1})

    @classmethod
    def const(cls, value: Number) -> 'LinExpr':
        return cls(constant=value)

    def as_dict(self) -> Dict[VarId, Fraction]:
        return dict(self.terms)

    def coefficient(self, var: VarId) -> Fraction:
        return self.as_dict().get(var, Fraction(0))

    def variables(self) -> FrozenSet[VarId]:
        return frozenset(v for v, _ in self.terms)

    def is_constant(self) -> bool:
        return not self.terms

    def __add__(self, other):
        other = _lift(other)
        terms = self.as_dict()
        for var, coef in other.terms:
            terms[var] = terms.get(var, 0) + coef
        return LinExpr(terms, self.constant + other.constant)

    __radd__ = __add__

    def __neg__(self):
        return LinExpr({v: -c for v, c in self.terms}, -self.constant)

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, scalar: Number):
        if isinstance(scalar, LinExpr):
            raise TypeError("products of linear expressions are not linear")
        scalar = Fraction(scalar)
        return LinExpr({v: c * scalar for v, c in self.terms}, self.constant * scalar)

    __rmul__ = __mul__

    def evaluate(self, point: Mapping[VarId, Number]) -> Fraction:
        return sum((c * Fraction(point[v]) for v, c in self.terms), self.constant)

    def normalized(self) -> Tuple['LinExpr', Fraction]:
        """
        (e', k) with self == k * e' and e' leading with coefficient +1.

        Constant expressions normalize to themselves with k = 1.
        """
        if not self.terms:
            return self, Fraction(1)
        k = self.terms[0][1]
        return self * (1 / k), k

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LinExpr.const(other)
        if not isinstance(other, LinExpr):
            return NotImplemented
        return self.terms == other.terms and self.constant == other.constant

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.terms, self.constant))
        return self._hash

    def __str__(self):
        parts = []
        for var, coef in self.terms:
            mag = abs(coef)
            text = str(var) if mag == 1 else f'{mag}*{var}'
            parts.append(('- ' if coef < 0 else '+ ') + text)
        if self.constant or not parts:
            parts.append(('- ' if self.constant < 0 else '+ ') + str(abs(self.constant)))
        text = ' '.join(parts)
        return text[2:] if text.startswith('+ ') else '-' + text[2:]

    def __repr__(self):
        return f'LinExpr({self})'


def _lift(value) -> LinExpr:
    if isinstance(value, LinExpr):
        return value
    if isinstance(value, VarId):
        return LinExpr.var(value)
    return LinExpr.const(value)


class Relation(str, Enum):
    EQ = '='
    GE = '>='
    GT = '>'


@dataclass(frozen=True)
class Constraint:
    """``expr <relation> 0``."""
    expr: LinExpr
    relation: Relation

    def holds(self, point: Mapping[VarId, Number]) -> bool:
        value = self.expr.evaluate(point)
        if self.relation is Relation.EQ:
            return value == 0
        if self.relation is Relation.GE:
            return value >= 0
        return value > 0

    def __str__(self):
        return f'{self.expr} {self.relation.value} 0'


class ConstraintSystem:
    """Immutable conjunction of constraints; extending returns a new system."""
    __slots__ = ('constraints', '_key')

    def __init__(self, constraints: Iterable[Constraint] = ()):
        self.constraints: Tuple[Constraint, ...] = tuple(constraints)
        self._key = None

    def add(self, expr: LinExpr, relation: Relation) -> 'ConstraintSystem':
        return ConstraintSystem(self.constraints + (Constraint(_lift(expr), relation),))

    def extend(self, constraints: Iterable[Constraint]) -> 'ConstraintSystem':
        return ConstraintSystem(self.constraints + tuple(constraints))

    def variables(self) -> FrozenSet[VarId]:
        out = set()
        for c in self.constraints:
            out |= c.expr.variables()
        return frozenset(out)

    def satisfied_by(self, point: Mapping[VarId, Number]) -> bool:
        try:
            return all(c.holds(point) for c in self.constraints)
        except KeyError:
            return False

    def key(self) -> FrozenSet[Constraint]:
        """Order-free identity, used to memoize solves."""
        if self._key is None:
            self._key = frozenset(self.constraints)
        return self._key

    def __iter__(self) -> Iterator[Constraint]:
        return iter(self.constraints)

    def __len__(self):
        return len(self.constraints)

    def __str__(self):
        return '\n'.join(str(c) for c in self.constraints)


class _Tableau:
    """Dense simplex tableau in equality form A x = b, x >= 0, b >= 0."""

    def __init__(self, rows: List[List[Fraction]], rhs: List[Fraction], n_cols: int):
        self.A = rows
        self.b = rhs
        self.n = n_cols
        self.m = len(rows)
        self.basis: List[int] = []

    def pivot(self, i: int, j: int):
        piv = self.A[i][j]
        row = [v / piv for v in self.A[i]]
        self.A[i] = row
        self.b[i] /= piv
        for k in range(self.m):
            if k != i:
                f = self.A[k][j]
                if f:
                    self.A[k] = [a - f * r for a, r in zip(self.A[k], row)]
                    self.b[k] -= f * self.b[i]
        self.basis[i] = j

    def reduced_costs(self, c: List[Fraction], allowed: List[bool]) -> List[Optional[Fraction]]:
        out = []
        for j in range(self.n):
            if not allowed[j]:
                out.append(None)
                continue
            out.append(c[j] - sum(c[self.basis[i]] * self.A[i][j] for i in range(self.m)))
        return out

    def bland_primal_step(self, c: List[Fraction], allowed: List[bool]) -> str:
        rc = self.reduced_costs(c, allowed)
        entering = next((j for j in range(self.n)
                         if rc[j] is not None and rc[j] > 0 and j not in self.basis), None)
        if entering is None:
            return 'optimal'
        try:
            _, _, i = min((self.b[i] / self.A[i][entering], self.basis[i], i)
                          for i in range(self.m) if self.A[i][entering] > 0)
        except ValueError:
            return 'unbounded'
        self.pivot(i, entering)
        return 'go_on'

    def bland_primal(self, c: List[Fraction], allowed: List[bool]) -> str:
        while True:
            status = self.bland_primal_step(c, allowed)
            if status != 'go_on':
                return status

    def objective(self, c: List[Fraction]) -> Fraction:
        return sum((c[self.basis[i]] * self.b[i] for i in range(self.m)), Fraction(0))

    def solution(self) -> List[Fraction]:
        x = [Fraction(0)] * self.n
        for i, j in enumerate(self.basis):
            x[j] = self.b[i]
        return x

    def drop_row(self, i: int):
        del self.A[i]
        del self.b[i]
        del self.basis[i]
        self.m -= 1


def _sign_restricted(system: ConstraintSystem) -> FrozenSet[VarId]:
    # single-variable rows c*x >= 0 or c*x > 0 with c > 0
    out = set()
    for c in system:
        expr = c.expr
        if (c.relation is not Relation.EQ and expr.constant == 0
                and len(expr.terms) == 1 and expr.terms[0][1] > 0):
            out.add(expr.terms[0][0])
    return frozenset(out)


def _solve(system: ConstraintSystem) -> Optional[Point]:
    variables = sorted(system.variables())
    nonneg = _sign_restricted(system)
    has_strict = any(c.relation is Relation.GT for c in system)

    # structural columns: (var, sign)
    columns: List[Tuple[VarId, int]] = []
    for var in variables:
        columns.append((var, 1))
        if var not in nonneg:
            columns.append((var, -1))
    t_col = len(columns) if has_strict else None
    n_struct = len(columns) + (1 if has_strict else 0)

    raw: List[Tuple[Dict[int, Fraction], Fraction]] = []
    n_slack = 0
    col_index = {}
    for idx, (var, sgn) in enumerate(columns):
        col_index.setdefault(var, []).append((idx, sgn))
    for c in system:
        row: Dict[int, Fraction] = {}
        for var, coef in c.expr.terms:
            for idx, sgn in col_index[var]:
                row[idx] = coef * sgn
        if c.relation is Relation.GT:
            row[t_col] = Fraction(-1)
        if c.relation is not Relation.EQ:
            row[('slack', n_slack)] = Fraction(-1)
            n_slack += 1
        raw.append((row, -c.expr.constant))
    if has_strict:
        raw.append(({t_col: Fraction(1), ('slack', n_slack): Fraction(1)}, Fraction(1)))
        n_slack += 1

    m = len(raw)
    n_cols = n_struct + n_slack + m
    rows, rhs = [], []
    for i, (row, b) in enumerate(raw):
        dense = [Fraction(0)] * n_cols
        for key, v in row.items():
            j = n_struct + key[1] if isinstance(key, tuple) else key
            dense[j] = v
        if b < 0:
            dense = [-v for v in dense]
            b = -b
        dense[n_struct + n_slack + i] = Fraction(1)
        rows.append(dense)
        rhs.append(b)

    tableau = _Tableau(rows, rhs, n_cols)
    tableau.basis = [n_struct + n_slack + i for i in range(m)]
    first_art = n_struct + n_slack

    # phase one: drive the artificials to zero
    c1 = [Fraction(0)] * first_art + [Fraction(-1)] * m
    tableau.bland_primal(c1, [True] * n_cols)
    if tableau.objective(c1) < 0:
        return None
    i = 0
    while i < tableau.m:
        if tableau.basis[i] >= first_art:
            j = next((j for j in range(first_art) if tableau.A[i][j] != 0), None)
            if j is None:
                tableau.drop_row(i)
                continue
            tableau.pivot(i, j)
        i += 1

    allowed = [j < first_art for j in range(n_cols)]
    if has_strict:
        c2 = [Fraction(0)] * n_cols
        c2[t_col] = Fraction(1)
        tableau.bland_primal(c2, allowed)
        if tableau.objective(c2) <= 0:
            return None

    x = tableau.solution()
    point: Point = {var: Fraction(0) for var in variables}
    for idx, (var, sgn) in enumerate(columns):
        point[var] += sgn * x[idx]
    return point


def _integral(point: Point) -> Point:
    # positive rescaling to coprime integers
    if not point:
        return point
    denominators = [v.denominator for v in point.values()]
    lcm = reduce(lambda a, b: a * b // gcd(a, b), denominators, 1)
    scaled = {k: v * lcm for k, v in point.items()}
    common = reduce(gcd, (int(v) for v in scaled.values()), 0)
    if common > 1:
        scaled = {k: v / common for k, v in scaled.items()}
    return scaled


def feasible(system: ConstraintSystem) -> Optional[Point]:
    """
    Decide feasibility exactly.

    Returns:
        A satisfying point over the system's variables, or None. When every
        row is homogeneous the point is scaled to coprime integers.

    Raises:
        SolverError: the point failed exact re-substitution
    """
    point = _solve(system)
    if point is None:
        return None
    if all(c.expr.constant == 0 for c in system):
        point = _integral(point)
    if not system.satisfied_by(point):
        raise SolverError(f"witness {point} violates the system\n{system}")
    return point


class Sign(str, Enum):
    POSITIVE = '>'
    NEGATIVE = '<'
    ZERO = '='
    UNKNOWN = '?'


def implied_sign(system: ConstraintSystem, expr: LinExpr,
                 point: Optional[Mapping[VarId, Number]] = None,
                 solve: Callable[[ConstraintSystem], Optional[Point]] = feasible) -> Sign:
    """
    The sign of ``expr`` forced by a feasible system, if any.

    Each answer is proved by the infeasibility of the opposite case. A point
    satisfying the system rules out every sign but its own, so only that one
    is tested. ``solve`` lets a caller share its LP memo.
    """
    expr = _lift(expr)
    here = None
    if point is not None and system.satisfied_by(point):
        value = expr.evaluate(point)
        here = Sign.POSITIVE if value > 0 else Sign.NEGATIVE if value < 0 else Sign.ZERO
    if here in (None, Sign.POSITIVE) and solve(system.add(-expr, Relation.GE)) is None:
        return Sign.POSITIVE
    if here in (None, Sign.NEGATIVE) and solve(system.add(expr, Relation.GE)) is None:
        return Sign.NEGATIVE
    if (here in (None, Sign.ZERO)
            and solve(system.add(expr, Relation.GT)) is None
            and solve(system.add(-expr, Relation.GT)) is None):
        return Sign.ZERO
    return Sign.UNKNOWN


def fourier_motzkin_feasible(system: ConstraintSystem) -> bool:
    """
    Feasibility by Fourier-Motzkin elimination, used as an oracle on small systems.

    Rows are kept as (coefficients, constant, strict) meaning
    ``sum coef*x + constant > 0`` when strict, ``>= 0`` otherwise.
    """
    rows = set()

    def norm(coefs: Dict[VarId, Fraction], const: Fraction, strict: bool):
        coefs = {k: v for k, v in coefs.items() if v}
        if coefs:
            scale = max(abs(v) for v in coefs.values())
        else:
            scale = abs(const) or Fraction(1)
        return (tuple(sorted((k, v / scale) for k, v in coefs.items())), const / scale, strict)

    for c in system:
        coefs = c.expr.as_dict()
        const = c.expr.constant
        if c.relation is Relation.EQ:
            rows.add(norm(coefs, const, False))
            rows.add(norm({k: -v for k, v in coefs.items()}, -const, False))
        else:
            rows.add(norm(coefs, const, c.relation is Relation.GT))

    for var in sorted(system.variables()):
        pos, neg, rest = [], [], set()
        for row in rows:
            a = dict(row[0]).get(var, 0)
            if a > 0:
                pos.append(row)
            elif a < 0:
                neg.append(row)
            else:
                rest.add(row)
        for p in pos:
            pc, pk, ps = dict(p[0]), p[1], p[2]
            for q in neg:
                qc, qk, qs = dict(q[0]), q[1], q[2]
                a, b = pc[var], -qc[var]
                merged = {}
                for k in set(pc) | set(qc):
                    if k != var:
                        merged[k] = b * pc.get(k, 0) + a * qc.get(k, 0)
                merged = {k: v for k, v in merged.items() if v}
                rest.add(norm(merged, b * pk + a * qk, ps or qs))
        rows = rest

    for coefs, const, strict in rows:
        if coefs:
            continue
        if const < 0 or (strict and const == 0):
            return False
    return True
