"""
Tests for the exact rational feasibility solver.
"""
from fractions import Fraction

from hypothesis import given, strategies as st, settings, HealthCheck

from qreality.linfeas import (ConstraintSystem, LinExpr, Relation, Sign, VarId, feasible,
                              fourier_motzkin_feasible, implied_sign)

x, y, z = (VarId.density1(i) for i in (1, 2, 3))
X, Y, Z = (LinExpr.var(v) for v in (x, y, z))


def _build(rows):
    s = ConstraintSystem()
    for expr, rel in rows:
        s = s.add(expr, rel)
    return s


def test_varid_display():
    """Unknowns print as densities or measure values."""
    assert str(VarId.density1(1)) == 'f(1)'
    assert str(VarId.density2(2, 1)) == 'f(1,2)'
    assert str(VarId.measure(0b101)) == 'mu({1,3})'


def test_linexpr_arithmetic():
    """Linear expressions add, scale and evaluate exactly."""
    e = 2 * X - Y + 3
    assert e.coefficient(x) == 2
    assert e.coefficient(y) == -1
    assert e.constant == 3
    assert (e - e).is_constant()
    assert e.evaluate({x: 1, y: 5}) == 0
    assert str(X - Y) == 'f(1) - f(2)'


def test_normalized_keeps_sign_information():
    """Normalization returns the scale factor with its sign."""
    norm, k = (Y * -3 + X * 6).normalized()
    assert k == 6
    assert norm == X - Fraction(1, 2) * Y


def test_strict_inequality_needs_room():
    """A strict row cannot hold at the boundary."""
    assert feasible(_build([(X, Relation.GT), (-X, Relation.GE)])) is None
    assert feasible(_build([(X, Relation.GE), (-X, Relation.GE)])) == {x: 0}


def test_equality_with_free_variable():
    """Equalities leave room for strict rows elsewhere."""
    point = feasible(_build([(X + Y - 4, Relation.EQ), (X - Y, Relation.GT)]))
    assert point is not None
    assert point[x] + point[y] == 4
    assert point[x] > point[y]


def test_homogeneous_witness_is_integral():
    """Homogeneous systems get coprime integer witnesses."""
    point = feasible(_build([(X, Relation.GT), (Y, Relation.GT), (2 * X - 3 * Y, Relation.EQ)]))
    assert point is not None
    assert all(v.denominator == 1 for v in point.values())
    assert 2 * point[x] == 3 * point[y]


def test_chain_of_strict_inequalities_is_infeasible_when_cyclic():
    """A strict cycle is infeasible by both solvers."""
    rows = [(Y - X, Relation.GT), (Z - Y, Relation.GT), (X - Z, Relation.GT)]
    assert feasible(_build(rows)) is None
    assert not fourier_motzkin_feasible(_build(rows))


def test_implied_sign():
    """Each forced sign is found, and a free difference stays unknown."""
    assert implied_sign(_build([(X - 1, Relation.GE)]), X) is Sign.POSITIVE
    assert implied_sign(ConstraintSystem(), X - Y) is Sign.UNKNOWN
    assert implied_sign(_build([(X - Y, Relation.EQ)]), X - Y) is Sign.ZERO
    assert implied_sign(_build([(Y - X, Relation.GT)]), X - Y) is Sign.NEGATIVE


def test_implied_sign_with_point_tests_only_the_point_sign():
    """A satisfying point limits the work to one sign and shares the caller's memo."""
    calls = []

    def solve(system):
        calls.append(system)
        return feasible(system)

    system = _build([(X - 1, Relation.GE), (Y, Relation.GE)])
    assert implied_sign(system, X, {x: 2, y: 0}, solve) is Sign.POSITIVE
    assert len(calls) == 1
    calls.clear()
    assert implied_sign(system, X - Y, {x: 2, y: 0}, solve) is Sign.UNKNOWN
    assert len(calls) == 1
    calls.clear()
    tied = _build([(X - Y, Relation.EQ)])
    assert implied_sign(tied, X - Y, {x: 3, y: 3}, solve) is Sign.ZERO
    assert len(calls) == 2


def test_implied_sign_ignores_a_point_outside_the_system():
    """A hint that violates the system falls back to testing every sign."""
    system = _build([(Y - X, Relation.GT)])
    assert implied_sign(system, X - Y, {x: 5, y: 1}) is Sign.NEGATIVE


def test_empty_system_is_feasible():
    """No rows means the empty point."""
    assert feasible(ConstraintSystem()) == {}


coefficients = st.integers(min_value=-3, max_value=3)
sparse_coefficients = st.one_of(st.just(0), st.just(0), coefficients)
relations = st.sampled_from([Relation.EQ, Relation.GE, Relation.GT])
variables = [VarId.density1(i) for i in range(1, 13)]


@st.composite
def small_systems(draw):
    # elimination grows with rows, not columns, so rows stay few and sparse
    n_vars = draw(st.integers(min_value=1, max_value=12))
    rows = draw(st.lists(
        st.tuples(st.lists(sparse_coefficients, min_size=n_vars, max_size=n_vars), coefficients,
                  relations),
        min_size=1, max_size=6))
    s = ConstraintSystem()
    for coefs, const, rel in rows:
        s = s.add(LinExpr(dict(zip(variables, coefs)), const), rel)
    return s


# Feature: qreality, Property: simplex and elimination agree on feasibility
@given(s=small_systems())
@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
def test_simplex_agrees_with_fourier_motzkin(s):
    """Simplex and Fourier-Motzkin give the same verdict on systems of up to 12 unknowns."""
    point = feasible(s)
    assert (point is not None) == fourier_motzkin_feasible(s), f"disagreement on\n{s}"
    if point is not None:
        assert s.satisfied_by(point)


def test_wide_system_agrees_with_fourier_motzkin():
    """A twelve-unknown chain with a closing strict row is infeasible both ways."""
    xs = [LinExpr.var(v) for v in variables]
    rows = [(xs[i + 1] - xs[i], Relation.GE) for i in range(11)]
    rows.append((xs[0] - xs[11], Relation.GT))
    assert feasible(_build(rows)) is None
    assert not fourier_motzkin_feasible(_build(rows))
    rows[-1] = (xs[0] - xs[11], Relation.GE)
    point = feasible(_build(rows))
    assert point is not None and fourier_motzkin_feasible(_build(rows))
    assert len({point.get(v, Fraction(0)) for v in variables}) == 1
