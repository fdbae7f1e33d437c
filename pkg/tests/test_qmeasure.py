"""
Tests for q-measure validation, extension, regularity and preclusivity.
"""
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st, settings

from qreality.errors import (InvalidDirac, NegativeExtension, NegativeValue, NonzeroEmpty,
                             NotGrade2Additive)
from qreality.expr import parse_coevent
from qreality.qmeasure import (dirac, extend_from_pairs, is_preclusive, is_regular,
                               precluded_events, satisfies_expansion, satisfies_grade2, validate)

PARITY_MU = {1: 5, 2: 3, 4: 6, 3: 6, 5: 9, 6: 3, 7: 4}


def test_validate_accepts_grade2_measure():
    """A grade-2 additive table validates."""
    mu = validate(PARITY_MU, 3)
    assert mu(7) == 4
    assert mu(0) == 0
    assert mu.total == 4


def test_validate_rejects_nonzero_empty():
    """mu of the empty set must be 0."""
    with pytest.raises(NonzeroEmpty):
        validate([1, 1, 1, 1], 2)


def test_validate_rejects_negative():
    """Negative values are rejected with the offending event."""
    with pytest.raises(NegativeValue) as info:
        validate([0, -1, 0, 0], 2)
    assert info.value.event == '{1}'


def test_validate_rejects_broken_additivity():
    """Changing the whole-space value breaks grade-2 additivity."""
    broken = dict(PARITY_MU)
    broken[7] = 5
    with pytest.raises(NotGrade2Additive):
        validate(broken, 3)


def test_every_n2_table_is_grade2():
    """Two points have no disjoint nonempty triples."""
    # no disjoint nonempty triples exist on two points
    assert satisfies_grade2([0, 3, 0, 7])


rationals = st.fractions(min_value=0, max_value=6, max_denominator=4)


@st.composite
def pairwise_measures(draw, n):
    """Tables mu(A) = sum of w(i, j) over i <= j in A, which are grade-2 additive."""
    weights = {(i, j): draw(rationals) for i in range(n) for j in range(i, n)}
    table = []
    for event in range(1 << n):
        inside = [i for i in range(n) if event >> i & 1]
        table.append(sum((weights[(i, j)] for i in inside for j in inside if i <= j),
                         Fraction(0)))
    return table


# Feature: qreality, Property: triple form and pair expansion agree
@given(values=st.one_of(
    st.lists(rationals, min_size=15, max_size=15).map(lambda v: [Fraction(0)] + v),
    pairwise_measures(4)))
@settings(max_examples=1000, deadline=None)
def test_triple_and_expansion_forms_agree(values):
    """Both forms of grade-2 additivity accept the same tables on four points."""
    assert satisfies_grade2(values) == satisfies_expansion(values)


# Feature: qreality, Property: singleton and pair values determine the measure
@given(data=st.data(), n=st.sampled_from([3, 4]))
@settings(max_examples=200, deadline=None)
def test_extend_from_pairs_after_restriction(data, n):
    """Restricting a measure to singletons and pairs and extending again gives it back."""
    mu = validate(data.draw(pairwise_measures(n)), n)
    singles = {i: mu(1 << (i - 1)) for i in range(1, n + 1)}
    pairs = {(i, j): mu((1 << (i - 1)) | (1 << (j - 1)))
             for i in range(1, n + 1) for j in range(i + 1, n + 1)}
    assert extend_from_pairs(n, singles, pairs) == mu


def test_extend_from_pairs_three_points():
    """Singletons and pairs determine the parity measure."""
    mu = extend_from_pairs(3, {1: 5, 2: 3, 3: 6}, {(1, 2): 6, (1, 3): 9, (2, 3): 3})
    assert mu == validate(PARITY_MU, 3)


def test_extend_from_pairs_four_points():
    """Extension to triples and the whole space on four points."""
    mu = extend_from_pairs(4, {1: 1, 2: 1, 3: 1, 4: 1},
                           {(i, j): 3 for i in range(1, 5) for j in range(i + 1, 5)})
    # triples: 9 - 3 = 6; whole space: 18 - 2 * 4 = 10
    assert mu(0b0111) == 6
    assert mu(0b1111) == 10


def test_extend_from_pairs_negative():
    """An extension that goes negative is reported with its event."""
    with pytest.raises(NegativeExtension) as info:
        extend_from_pairs(3, {1: 5, 2: 5, 3: 5}, {(1, 2): 0, (1, 3): 0, (2, 3): 0})
    assert info.value.event == '{1,2,3}'


def test_regular_example():
    """A regular measure on three points."""
    mu = extend_from_pairs(3, {1: 1, 2: 1, 3: 4}, {(1, 2): 2, (1, 3): 5, (2, 3): 5})
    assert is_regular(mu).regular


def test_regularity_r1_failure_with_witness():
    """A null singleton whose union changes the measure fails R1."""
    mu = validate([0, 0, 0, 5], 2)
    report = is_regular(mu)
    assert not report.r1
    assert (1, 2) in report.r1_witnesses
    assert report.r2


def test_regularity_r2_failure():
    """A null union of unequal parts fails R2."""
    mu = validate([0, 1, 2, 0], 2)
    report = is_regular(mu)
    assert not report.r2
    assert report.r2_witnesses == [(1, 2)]


def test_precluded_events_include_empty():
    """The empty set is always precluded."""
    mu = dirac(1, 1, 2)
    assert precluded_events(mu) == frozenset({0, 2})


def test_preclusivity_witness():
    """Preclusivity reports the first precluded event where phi is 1."""
    mu = dirac(1, 1, 2)
    ok, witness = is_preclusive(parse_coevent('w1 + w2', 2), mu)
    assert not ok and witness == 0b10
    ok, witness = is_preclusive(parse_coevent('w1', 2), mu)
    assert ok and witness is None


def test_dirac_values():
    """Weighted point masses and their weight check."""
    mu = dirac(Fraction(3, 2), 2, 3)
    assert [mu(e) for e in range(8)] == [0, 0, Fraction(3, 2), Fraction(3, 2), 0,
                                         0, Fraction(3, 2), Fraction(3, 2)]
    with pytest.raises(InvalidDirac):
        dirac(0, 1, 3)


@pytest.mark.parametrize('n', [1, 2, 3, 4])
def test_dirac_is_regular(n):
    """Every weighted point mass satisfies both regularity conditions."""
    for omega in range(1, n + 1):
        report = is_regular(dirac(Fraction(5, 2), omega, n))
        assert report.r1 and report.r2, f"point mass at {omega} on {n} points"
