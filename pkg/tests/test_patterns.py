import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from momgt.errors import InvalidArgumentError
from momgt.patterns import (
    OrthogonalPattern,
    SymplecticPattern,
    flip_last,
    interlaces,
    iterate_interlacing_rows,
    iterate_orthogonal_patterns,
    iterate_symplectic_patterns,
    o_weight_exponents,
    rectangular,
    signature,
    sp_weight_exponents,
    validate_orthogonal,
    validate_symplectic,
)

SAMPLE_SP = [(1,), (2,), (2, 1), (3, 2)]
SAMPLE_O = [(-1,), (1,), (2, 0), (2, 2), (4, 2, -2)]


def test_signature_rejects_increasing():
    assert signature([3, 1, 1]) == (3, 1, 1)
    with pytest.raises(InvalidArgumentError):
        signature([1, 2])


def test_constructors():
    assert rectangular(4, 3) == (4, 4, 4)
    assert flip_last((3, 2)) == (3, -2)


@pytest.mark.parametrize("lower, upper, expected", [
    ((1,), (2, 1), True),
    ((3,), (2, 1), False),
    ((2, 0), (2, 1), True),
    ((2, 2), (2, 1), False),
])
def test_interlaces_examples(lower, upper, expected):
    assert interlaces(lower, upper) is expected


def test_interlaces_length_mismatch():
    with pytest.raises(InvalidArgumentError):
        interlaces((1,), (3, 2, 1))


def test_iterate_rows_examples():
    assert list(iterate_interlacing_rows((1,), 2, 1)) == [(1, 0), (1, 1)]
    assert list(iterate_interlacing_rows((), 1, 2)) == [(0,), (1,), (2,)]
    assert list(iterate_interlacing_rows((2, 2), 2, 2)) == [(2, 2)]


def _all_rows(length, ceiling):
    for r in itertools.product(range(ceiling + 1), repeat=length):
        if all(a >= b for a, b in zip(r, r[1:])):
            yield r


@pytest.mark.parametrize("ceiling", [0, 1, 2, 3])
@pytest.mark.parametrize("length", [1, 2, 3])
def test_iterate_rows_exhaustive(length, ceiling):
    for prev_len in (length - 1, length):
        for prev in _all_rows(prev_len, ceiling):
            got = list(iterate_interlacing_rows(prev, length, ceiling))
            want = [r for r in _all_rows(length, ceiling) if interlaces(prev, r)]
            assert got == want


def test_validate_symplectic():
    assert validate_symplectic(SAMPLE_SP).ok
    assert validate_symplectic([(0,), (0,), (0, 0), (0, 0)]).ok
    report = validate_symplectic([(2,), (1,), (1, 1), (1, 1)])
    assert not report.ok
    assert report.violations[0].row == 1


def test_validate_orthogonal():
    assert validate_orthogonal(SAMPLE_O).ok
    assert validate_orthogonal([(0,), (0,), (0, 0)]).ok
    report = validate_orthogonal([(-2,), (1,), (1, 1)])
    assert not report.ok
    assert "starter" in report.violations[0].message


def test_shape_is_reported_not_raised():
    report = validate_symplectic([(1,), (1, 1)])
    assert not report.ok


def test_pattern_types_validate_eagerly():
    assert SymplecticPattern(SAMPLE_SP).top == (3, 2)
    with pytest.raises(InvalidArgumentError):
        SymplecticPattern([(2,), (1,), (1, 1), (1, 1)])
    with pytest.raises(InvalidArgumentError):
        OrthogonalPattern([(-2,), (1,), (1, 1)])


def test_weight_examples():
    assert sp_weight_exponents(SAMPLE_SP) == (0, 1)
    assert sp_weight_exponents([(0,)] * 2 + [(0, 0)] * 2) == (0, 0)
    assert sp_weight_exponents([(0,), (5,)]) == (5,)
    assert o_weight_exponents(SAMPLE_O) == (-1, -1, -2)
    assert o_weight_exponents([(0,), (0,), (0, 0)]) == (0, 0)
    assert o_weight_exponents([(-1,)]) == (-1,)


def test_weights_reject_invalid():
    with pytest.raises(InvalidArgumentError):
        sp_weight_exponents([(2,), (1,)])


@given(st.integers(0, 3), st.integers(1, 4), st.data())
def test_sp_weight_linearity(n, c, data):
    patterns = list(iterate_symplectic_patterns((n, max(n - 1, 0))))
    p = data.draw(st.sampled_from(patterns))
    scaled = [tuple(c * v for v in r) for r in p]
    assert sp_weight_exponents(scaled) == tuple(c * e for e in sp_weight_exponents(p))


def test_orthogonal_enumeration_signs():
    pats = list(iterate_orthogonal_patterns((1,)))
    assert pats == [((1,),)]
    pats = list(iterate_orthogonal_patterns((1, 1)))
    assert all(validate_orthogonal(p).ok for p in pats)
    starters = sorted(p[0][0] for p in pats)
    assert starters == [-1, 0, 1]


def test_starter_sign_flip_changes_exponents_by_sign_products():
    base = [(1,), (1,), (1, 1)]
    flipped = [(-1,), (1,), (1, 1)]
    e1, e2 = o_weight_exponents(base), o_weight_exponents(flipped)
    assert e2[0] == -e1[0]
    assert e2[1] == -e1[1]


def test_zero_starter_is_positive():
    # sgn(0) = +1: a zero starter contributes no sign flip
    assert o_weight_exponents([(0,), (1,), (1, 0)]) == o_weight_exponents([(-0,), (1,), (1, 0)])


@given(st.integers(0, 2), st.integers(1, 2))
def test_enumerated_patterns_are_valid(n, m):
    for p in iterate_symplectic_patterns(rectangular(n, m)):
        assert validate_symplectic(p).ok
    for p in iterate_orthogonal_patterns(rectangular(n, m)):
        assert validate_orthogonal(p).ok
