import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from momgt.asymptotics import (
    RNG_ALGORITHM,
    compare_to_estimate,
    double_factorial,
    half_pattern_volume,
    leading_coefficient_check,
    mc_volume,
    mc_volume_total,
    polytope_spec,
    symmetry_point_closed_form,
    symmetry_point_leading_check,
    vol_symmetry_point,
)
from momgt.errors import InvalidArgumentError
from momgt.lattice import sign_vectors
from momgt.polynomials import ExactPolynomial, mom_polynomial, reference_polynomial


def _dim(group, k, beta):
    kb = k * beta
    return kb * (2 * kb + 1) - k if group == "sp" else kb * (2 * kb - 1) - k


# -- polytope specs ---------------------------------------------------------

def test_sp_1_1_polytope():
    spec = polytope_spec("sp", 1, 1)
    assert spec.dimension == 2
    assert spec.determined_indices == ((3, 1),)


def test_sp_2_1_polytope():
    spec = polytope_spec("sp", 2, 1)
    assert spec.dimension == 8
    assert spec.determined_indices == ((4, 2), (7, 1))
    assert [d.constraint for d in spec.determined] == [0, 1]


def test_so_1_1_degenerate():
    spec = polytope_spec("so", 1, 1, (1, 1))
    assert spec.dimension == 0
    assert spec.degenerate
    with pytest.raises(InvalidArgumentError):
        mc_volume(spec, 10, 1)


@pytest.mark.parametrize("group,k,beta", [
    (g, k, b) for g in ("sp", "so") for k in (1, 2, 3) for b in (1, 2) if k * b <= 4])
def test_dimensions(group, k, beta):
    eps_list = [None] if group == "sp" else list(sign_vectors(k, beta))[::5]
    for eps in eps_list:
        spec = polytope_spec(group, k, beta, eps)
        assert spec.dimension == _dim(group, k, beta)
        assert len(spec.determined) == k
        free = set(spec.free_indices)
        assert free.isdisjoint(spec.determined_indices)
        assert len(free) + k == len(spec.coords)


def test_sign_vector_required_iff_orthogonal():
    with pytest.raises(InvalidArgumentError):
        polytope_spec("so", 1, 1)
    with pytest.raises(InvalidArgumentError):
        polytope_spec("sp", 1, 1, (1, 1))


# -- Monte Carlo ------------------------------------------------------------

def test_sp_1_1_volume():
    est = mc_volume(polytope_spec("sp", 1, 1), 10**6, 0x5EED)
    assert abs(est.mean - 0.5) <= 3 * est.standard_error
    assert 0 <= est.mean <= 1
    assert est.rng == RNG_ALGORITHM


def test_single_sample_estimates():
    spec = polytope_spec("sp", 1, 1)
    outcomes = {mc_volume(spec, 1, seed).mean for seed in range(40)}
    assert outcomes == {0.0, 1.0}
    for seed in range(40):
        est = mc_volume(spec, 1, seed)
        assert est.standard_error == 0.0


def test_bad_sample_count():
    with pytest.raises(InvalidArgumentError):
        mc_volume(polytope_spec("sp", 1, 1), 0, 1)


def test_determinism_and_thread_independence():
    spec = polytope_spec("sp", 2, 1)
    a = mc_volume(spec, 200_000, 7, threads=1, chunk=10_000)
    b = mc_volume(spec, 200_000, 7, threads=4, chunk=10_000)
    c = mc_volume(spec, 200_000, 7, threads=1, chunk=10_000)
    assert a == b == c


def test_streams_differ():
    spec = polytope_spec("sp", 1, 1)
    a = mc_volume(spec, 5000, 3, stream=0)
    b = mc_volume(spec, 5000, 3, stream=1)
    assert a.accepted != b.accepted


@pytest.mark.parametrize("group,k,beta", [
    ("sp", 1, 1), ("sp", 2, 1), ("sp", 1, 2), ("so", 2, 1), ("so", 1, 2)])
def test_volume_matches_leading_coefficient(group, k, beta):
    leading = reference_polynomial(group, k, beta).leading
    total = mc_volume_total(group, k, beta, 10**6, 0x5EED)
    assert compare_to_estimate(leading, total.mean, total.standard_error).passed


def test_leading_coefficient_check():
    r = mom_polynomial("sp", 1, 1)
    assert leading_coefficient_check(r, samples=200_000).passed
    assert leading_coefficient_check(r, Fraction(1, 2)).passed
    assert not leading_coefficient_check(r, Fraction(1, 3)).passed
    skipped = leading_coefficient_check(mom_polynomial("so", 1, 1))
    assert skipped.status == "SKIPPED"
    assert "dimension-0" in skipped.note


def test_compare_to_estimate():
    assert compare_to_estimate(Fraction(1, 2), 0.5, 0.0).passed
    assert not compare_to_estimate(Fraction(1, 2), 0.6, 0.0).passed
    c = compare_to_estimate(Fraction(1, 2), 0.52, 0.01)
    assert c.status == "PASS" and c.sigmas == pytest.approx(2.0)
    assert compare_to_estimate(Fraction(1, 2), 0.54, 0.01).status == "FAIL"


def test_volume_json():
    spec = polytope_spec("so", 2, 1, (1, 1, 1, 1))
    d = mc_volume(spec, 1000, 1).to_json(spec)
    assert d["epsilon"] == [1, 1, 1, 1]
    assert d["dimension"] == 4
    assert set(d) >= {"mean", "stderr", "samples", "seed"}


# -- half patterns and the symmetry point -----------------------------------

def test_half_pattern_examples():
    assert half_pattern_volume(1, (0.7,)) == pytest.approx(1.0)
    assert half_pattern_volume(2, (0.7,)) == pytest.approx(0.7)
    assert half_pattern_volume(3, (0.9, 0.4)) == pytest.approx((0.81 - 0.16) / 2)
    assert half_pattern_volume(3, (0.5, 0.5)) == pytest.approx(0.0)


def test_half_pattern_bad_input():
    with pytest.raises(InvalidArgumentError):
        half_pattern_volume(3, (0.5,))
    with pytest.raises(InvalidArgumentError):
        half_pattern_volume(3, (0.2, 0.5))


_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(8)


def _quad_box(f, lows, highs):
    """Tensor Gauss-Legendre over a box; exact for the low-degree polynomials here."""
    total = 0.0
    for combo in itertools.product(range(len(_NODES)), repeat=len(lows)):
        pt, w = [], 1.0
        for t, j in enumerate(combo):
            half = (highs[t] - lows[t]) / 2
            pt.append(lows[t] + half * (_NODES[j] + 1))
            w *= half * _WEIGHTS[j]
        total += w * f(tuple(pt))
    return total


def _half_volume_by_quadrature(s, top):
    # rows below a fixed row are confined to a box, so integrate row by row
    if s == 1:
        return 1.0
    below = s // 2
    lows = [top[i + 1] if i + 1 < len(top) else 0.0 for i in range(below)]
    highs = [top[i] for i in range(below)]
    return _quad_box(lambda row: _half_volume_by_quadrature(s - 1, row), lows, highs)


@given(st.integers(1, 4), st.lists(st.floats(0.0, 1.0), min_size=2, max_size=2))
def test_half_pattern_matches_quadrature(s, xs):
    top = tuple(sorted(xs, reverse=True))[: (s + 1) // 2]
    want = _half_volume_by_quadrature(s, top)
    got = half_pattern_volume(s, top)
    assert got == pytest.approx(want, rel=1e-8, abs=1e-12)


def test_double_factorial():
    assert [double_factorial(n) for n in (-1, 0, 1, 2, 5, 6)] == [1, 1, 1, 2, 15, 48]


def test_symmetry_point_volumes():
    assert vol_symmetry_point(1) == 1
    assert vol_symmetry_point(2) == Fraction(1, 3)
    assert vol_symmetry_point(3) == Fraction(1, 45)
    for s in range(1, 9):
        assert vol_symmetry_point(s) == symmetry_point_closed_form(s)


@pytest.mark.parametrize("s,leading", [(1, 1), (2, Fraction(1, 3)), (3, Fraction(1, 45)),
                                       (4, Fraction(1, 4725))])
def test_symmetry_point_leading(s, leading):
    rep = symmetry_point_leading_check(s)
    assert rep.passed
    assert rep.leading == leading
    assert rep.polynomial.degree == s * (s + 1) // 2


def test_symmetry_point_small_polynomials():
    assert symmetry_point_leading_check(1).polynomial == ExactPolynomial([1, 1])
    p = symmetry_point_leading_check(2).polynomial
    assert (p(0), p(1)) == (1, 5)

