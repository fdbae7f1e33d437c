"""
Symbolic decision procedures for the reality filters.

Density entries are LP unknowns. A q-integral of symbolic values depends on
their weak order, so each comparison splits the search three ways (<, =, >);
every branch carries its own constraint system, and a branch survives only
while its system is feasible. Each branch also carries one satisfying point:
a split whose sign agrees with the point needs no LP call.
"""
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from config import Config
from qreality.errors import (DensityError, DimensionMismatch, MeasureError, ResourceGuardError,
                             SolverError)
from qreality.logic import (Coevent, CoeventTable, SampleSpace, as_table, disjoint_triples,
                            elements_of)
from qreality.expr import format_coevent
from qreality.linfeas import (ConstraintSystem, LinExpr, Point, Relation, Sign, VarId,
                              feasible, implied_sign)
from qreality.models import FilterVerdict
from qreality.qintegral import Density, Density1, Density2, Mode, induced_values, product_density
from qreality.qmeasure import QMeasure, validate

logger = logging.getLogger(__name__)

DEFAULT_MAX_BRANCHES = Config.MAX_BRANCHES

_FLIP = {Sign.POSITIVE: Sign.NEGATIVE, Sign.NEGATIVE: Sign.POSITIVE, Sign.ZERO: Sign.ZERO}
_CONSTRAINT_FOR = {
    Sign.POSITIVE: (1, Relation.GT),
    Sign.NEGATIVE: (-1, Relation.GT),
    Sign.ZERO: (1, Relation.EQ),
}


def _sign_of(value: Fraction) -> Sign:
    return Sign.POSITIVE if value > 0 else Sign.NEGATIVE if value < 0 else Sign.ZERO


class BranchBudget:
    """Branch counter and LP memo shared by every branch of one search."""

    def __init__(self, max_branches: Optional[int] = DEFAULT_MAX_BRANCHES):
        self.max_branches = max_branches
        self.explored = 0
        self.lp_calls = 0
        self._memo: Dict[frozenset, Optional[Point]] = {}

    def charge(self):
        self.explored += 1
        if self.max_branches is not None and self.explored > self.max_branches:
            logger.warning("branch budget of %d exhausted", self.max_branches)
            raise ResourceGuardError(
                f"search exceeded {self.max_branches} branches; raise the limit to continue")

    def solve(self, system: ConstraintSystem) -> Optional[Point]:
        key = system.key()
        if key not in self._memo:
            self.lp_calls += 1
            self._memo[key] = feasible(system)
        return self._memo[key]


@dataclass(frozen=True)
class BranchContext:
    """
    One region of density space.

    ``point`` satisfies ``system``; ``decided`` maps normalized expressions
    to the sign fixed for them on this branch.
    """
    system: ConstraintSystem
    point: Mapping[VarId, Fraction]
    budget: BranchBudget = field(compare=False, repr=False)
    trace: Tuple[Tuple[str, str, str], ...] = ()
    decided: Mapping[LinExpr, Sign] = field(default_factory=dict)

    def known_sign(self, expr: LinExpr) -> Optional[Sign]:
        if expr.is_constant():
            return _sign_of(expr.constant)
        norm, k = expr.normalized()
        sign = self.decided.get(norm)
        if sign is None or k > 0:
            return sign
        return _FLIP[sign]

    def _assume(self, expr: LinExpr, sign: Sign) -> Optional['BranchContext']:
        factor, relation = _CONSTRAINT_FOR[sign]
        system = self.system.add(expr * factor, relation)
        self.budget.charge()
        point = self.point
        if not system.satisfied_by(point):
            point = self.budget.solve(system)
            if point is None:
                return None
        norm, k = expr.normalized()
        decided = dict(self.decided)
        decided[norm] = sign if k > 0 else _FLIP[sign]
        return replace(self, system=system, point=point, decided=decided)

    def require(self, expr: LinExpr, sign: Sign) -> Optional['BranchContext']:
        """Restrict to ``sign(expr) == sign``; None when that is infeasible here."""
        known = self.known_sign(expr)
        if known is not None:
            return self if known is sign else None
        return self._assume(expr, sign)

    def require_nonnegative(self, expr: LinExpr) -> Optional['BranchContext']:
        known = self.known_sign(expr)
        if known is not None:
            return None if known is Sign.NEGATIVE else self
        system = self.system.add(expr, Relation.GE)
        point = self.point
        if not system.satisfied_by(point):
            point = self.budget.solve(system)
            if point is None:
                return None
        return replace(self, system=system, point=point)

    def split(self, lhs: LinExpr, rhs: LinExpr) -> Iterator[Tuple[Sign, 'BranchContext']]:
        """
        Feasible refinements by the sign of ``lhs - rhs``, generated lazily.

        The branch the current point already lies in comes first.
        """
        expr = lhs - rhs
        known = self.known_sign(expr)
        if known is not None:
            yield known, self
            return
        here = _sign_of(expr.evaluate(self.point))
        step = (str(lhs), here.value, str(rhs))
        child = self._assume(expr, here)
        yield here, replace(child, trace=child.trace + (step,))
        # the other arms are pruned at once when the system forces the point's sign
        if implied_sign(self.system, expr, self.point, self.budget.solve) is not Sign.UNKNOWN:
            return
        for sign in (Sign.NEGATIVE, Sign.ZERO, Sign.POSITIVE):
            if sign is here:
                continue
            child = self._assume(expr, sign)
            if child is not None:
                yield sign, replace(child, trace=child.trace + ((str(lhs), sign.value, str(rhs)),))


def _weak_orders(items: Sequence[Tuple[LinExpr, int]], ctx: BranchContext
                 ) -> Iterator[Tuple[List[Tuple[LinExpr, int]], BranchContext]]:
    # blocks ascend by value; each block is (representative, element mask)
    def insert(blocks, k, ctx):
        if k == len(items):
            yield blocks, ctx
            return
        yield from place(blocks, k, 0, ctx)

    def place(blocks, k, i, ctx):
        expr, element = items[k]
        bit = 1 << (element - 1)
        if i == len(blocks):
            yield from insert(blocks + [(expr, bit)], k + 1, ctx)
            return
        rep, mask = blocks[i]
        for sign, child in ctx.split(expr, rep):
            if sign is Sign.NEGATIVE:
                yield from insert(blocks[:i] + [(expr, bit)] + blocks[i:], k + 1, child)
            elif sign is Sign.ZERO:
                yield from insert(blocks[:i] + [(rep, mask | bit)] + blocks[i + 1:], k + 1, child)
            else:
                yield from place(blocks, k, i + 1, child)

    yield from insert([], 0, ctx)


def iter_symbolic_q_integral(values: Sequence[Tuple[LinExpr, int]], phi: Coevent,
                             ctx: BranchContext) -> Iterator[Tuple[LinExpr, BranchContext]]:
    """Lazy form of :func:`symbolic_q_integral`."""
    for blocks, child in _weak_orders(values, ctx):
        total = LinExpr()
        previous = LinExpr()
        level = 0
        for _, mask in blocks:
            level |= mask
        for rep, mask in blocks:
            if phi(level):
                total = total + (rep - previous)
            previous = rep
            level &= ~mask
        yield total, child


def symbolic_q_integral(values: Sequence[Tuple[LinExpr, int]], phi: Coevent,
                        ctx: BranchContext) -> List[Tuple[LinExpr, BranchContext]]:
    """
    The q-integral of symbolic nonnegative values, one result per weak order.

    Args:
        values: (expression, element) pairs; elements not listed count as 0
        phi: the coevent
        ctx: the branch to refine

    Returns:
        (integral expression, refined branch) for every feasible weak order
    """
    return list(iter_symbolic_q_integral(values, phi, ctx))


@dataclass(frozen=True)
class GenerationProblem:
    """A coevent, a mode, and either a fixed measure or None for the existential form."""
    mode: Mode
    phi: CoeventTable
    measure: Optional[QMeasure] = None

    def __post_init__(self):
        if self.measure is not None and self.measure.n != self.phi.n:
            raise DimensionMismatch(
                f"coevent on Omega_{self.phi.n} against measure on Omega_{self.measure.n}")

    @property
    def n(self) -> int:
        return self.phi.n

    @property
    def existential(self) -> bool:
        return self.measure is None

    def unknowns(self) -> List[VarId]:
        if self.mode is Mode.GEN1:
            return [VarId.density1(i) for i in range(1, self.n + 1)]
        return [VarId.density2(i, j) for i in range(1, self.n + 1) for j in range(i, self.n + 1)]

    def root(self, budget: BranchBudget) -> BranchContext:
        unknowns = self.unknowns()
        system = ConstraintSystem()
        for var in unknowns:
            system = system.add(LinExpr.var(var), Relation.GT)
        decided = {LinExpr.var(var): Sign.POSITIVE for var in unknowns}
        return BranchContext(system, {var: Fraction(1) for var in unknowns}, budget,
                             decided=decided)

    def event_values(self, event: int, ctx: BranchContext) -> Iterator[Tuple[LinExpr, BranchContext]]:
        """Symbolic value of the event under the mode, per feasible sub-branch."""
        inside = elements_of(event)
        if self.mode is Mode.GEN1:
            values = [(LinExpr.var(VarId.density1(i)), i) for i in inside]
            yield from iter_symbolic_q_integral(values, self.phi, ctx)
            return
        targets = inside if self.mode is Mode.GEN2 else list(range(1, self.n + 1))

        def inner(k, ctx, acc):
            if k == len(targets):
                yield acc, ctx
                return
            j = targets[k]
            column = [(LinExpr.var(VarId.density2(i, j)), i) for i in inside]
            for g, child in iter_symbolic_q_integral(column, self.phi, ctx):
                yield from inner(k + 1, child, acc + [(g, j)])

        for outer, child in inner(0, ctx, []):
            yield from iter_symbolic_q_integral(outer, self.phi, child)


@dataclass(frozen=True)
class Leaf:
    """A surviving branch with the symbolic measure it induces."""
    context: BranchContext
    measure: Dict[int, LinExpr]

    def measure_at(self, point: Mapping[VarId, Fraction]) -> List[Fraction]:
        return [self.measure[event].evaluate(point) for event in sorted(self.measure)]


def _impose(problem: GenerationProblem, event: int, value: LinExpr, ctx: BranchContext,
            measure: Dict[int, LinExpr]) -> Optional[BranchContext]:
    if not problem.existential:
        return ctx.require(value - LinExpr.const(problem.measure(event)), Sign.ZERO)
    for a, b, c in disjoint_triples(event):
        if a | b | c != event:
            continue
        defect = (value - measure[a | b] - measure[a | c] - measure[b | c]
                  + measure[a] + measure[b] + measure[c])
        ctx = ctx.require(defect, Sign.ZERO)
        if ctx is None:
            return None
    return ctx.require_nonnegative(value)


def _search(problem: GenerationProblem, budget: BranchBudget) -> Iterator[Leaf]:
    events = SampleSpace(problem.n).nonempty_events()

    def walk(k, ctx, measure):
        if k == len(events):
            yield Leaf(ctx, measure)
            return
        event = events[k]
        for value, child in problem.event_values(event, ctx):
            child = _impose(problem, event, value, child, measure)
            if child is not None:
                yield from walk(k + 1, child, {**measure, event: value})

    yield from walk(0, problem.root(budget), {0: LinExpr()})


def explore_leaves(problem: GenerationProblem,
                   max_branches: Optional[int] = DEFAULT_MAX_BRANCHES) -> List[Leaf]:
    """Every surviving leaf of the search, in search order."""
    return list(_search(problem, BranchBudget(max_branches)))


def _density_from(problem: GenerationProblem, point: Mapping[VarId, Fraction]) -> Density:
    if problem.mode is Mode.GEN1:
        return Density1(tuple(point[VarId.density1(i)] for i in range(1, problem.n + 1)))
    return Density2.of(problem.n, {var.index: point[var] for var in problem.unknowns()})


def decide(problem: GenerationProblem,
           max_branches: Optional[int] = DEFAULT_MAX_BRANCHES) -> FilterVerdict:
    """
    Run the branch search until the first surviving leaf.

    Raises:
        ResourceGuardError: the branch budget ran out
        SolverError: a feasible leaf failed concrete re-computation
    """
    budget = BranchBudget(max_branches)
    label = format_coevent(problem.phi)
    leaf = next(_search(problem, budget), None)
    if leaf is None:
        logger.info("%s %s: infeasible after %d branches (%d LP calls)",
                    problem.mode, label, budget.explored, budget.lp_calls)
        return FilterVerdict(problem.mode, label, problem.n, False, problem.existential,
                             budget.explored)

    point = feasible(leaf.context.system)
    if point is None:
        raise SolverError(f"surviving branch for {label} has an infeasible system")
    density = _density_from(problem, point)
    measure = validate(leaf.measure_at(point), problem.n) if problem.existential else None
    verdict = FilterVerdict(problem.mode, label, problem.n, True, problem.existential,
                            budget.explored, density, measure, leaf.context.trace)
    if not verify_witness(verdict, problem):
        raise SolverError(f"witness for {label} does not reproduce the measure")
    logger.info("%s %s: feasible after %d branches (%d LP calls)",
                problem.mode, label, budget.explored, budget.lp_calls)
    return verdict


def _problem(mode: Mode, phi: Coevent, mu: Optional[QMeasure]) -> GenerationProblem:
    return GenerationProblem(mode, as_table(phi), mu)


def check_1generated(phi: Coevent, mu: QMeasure, **kwargs) -> FilterVerdict:
    return decide(_problem(Mode.GEN1, phi, mu), **kwargs)


def check_1generated_existential(phi: Coevent, **kwargs) -> FilterVerdict:
    return decide(_problem(Mode.GEN1, phi, None), **kwargs)


def check_2generated(phi: Coevent, mu: QMeasure, **kwargs) -> FilterVerdict:
    return decide(_problem(Mode.GEN2, phi, mu), **kwargs)


def check_2generated_existential(phi: Coevent, **kwargs) -> FilterVerdict:
    return decide(_problem(Mode.GEN2, phi, None), **kwargs)


def check_actualized(phi: Coevent, mu: QMeasure, **kwargs) -> FilterVerdict:
    return decide(_problem(Mode.ACTUALIZE, phi, mu), **kwargs)


def check_actualized_existential(phi: Coevent, **kwargs) -> FilterVerdict:
    return decide(_problem(Mode.ACTUALIZE, phi, None), **kwargs)


def check(mode: Mode, phi: Coevent, mu: Optional[QMeasure] = None, **kwargs) -> FilterVerdict:
    """Dispatch on mode; ``mu=None`` asks the existential question."""
    return decide(_problem(Mode(mode), phi, mu), **kwargs)


def verify_witness(verdict: FilterVerdict, problem: GenerationProblem) -> bool:
    """
    Recompute the measure from the verdict's density with concrete integrals.

    The target is the problem's measure, or for existential problems the
    verdict's own measure, which must itself be a q-measure.
    """
    if not verdict.feasible or verdict.density is None:
        return False
    density = verdict.density
    expected_type = Density1 if problem.mode is Mode.GEN1 else Density2
    if not isinstance(density, expected_type) or density.n != problem.n:
        return False
    if not density.is_positive():
        return False
    target = problem.measure if problem.measure is not None else verdict.measure
    if target is None or target.n != problem.n:
        return False
    if problem.measure is None:
        try:
            validate(target.values, target.n)
        except MeasureError:
            return False
    try:
        induced = induced_values(density, problem.phi, problem.mode)
    except (DensityError, DimensionMismatch):
        return False
    return all(a == b for a, b in zip(induced, target.values))


def gen1_criterion_n3(phi: Coevent) -> bool:
    """
    Exact 1-generation test on Omega_3.

    phi(Omega) must equal the sum of phi over doubletons minus the sum over
    singletons, as integers.
    """
    table = as_table(phi)
    if table.n != 3:
        raise DimensionMismatch("this criterion is stated for n = 3")
    singles = sum(table(1 << i) for i in range(3))
    pairs = sum(table((1 << i) | (1 << j)) for i, j in combinations(range(3), 2))
    return table(7) == pairs - singles


def thm51_criterion(phi: Coevent) -> bool:
    """
    The singleton-weighted n = 3 criterion, taken literally.

    True when phi(Omega) + b * phi({w}) equals the doubleton sum minus the
    singleton sum for some b in {1, 2, 3} and some element w. It disagrees
    with the search on several coevents; see :func:`gen1_criterion_n3`.
    """
    table = as_table(phi)
    if table.n != 3:
        raise DimensionMismatch("this criterion is stated for n = 3")
    singles = sum(table(1 << i) for i in range(3))
    pairs = sum(table((1 << i) | (1 << j)) for i, j in combinations(range(3), 2))
    return any(table(7) + b * table(1 << i) == pairs - singles
               for b in (1, 2, 3) for i in range(3))


def lift_gen1_to_actualize(f: Density1, mu: QMeasure) -> Density2:
    """
    Actualizing density built from a 1-generating one.

    If f 1-generates mu and mu(Omega) > 0, then g(w, w') = f(w) f(w') / mu(Omega)
    actualizes the same mu.
    """
    if mu.total <= 0:
        raise DensityError("the product construction needs mu(Omega) > 0")
    return product_density(f, mu.total)
