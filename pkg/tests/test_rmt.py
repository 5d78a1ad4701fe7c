import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from momgt.characters import bump_gamburd_average
from momgt.errors import InvalidArgumentError
from momgt.lattice import count_constrained
from momgt.rmt import (
    EigenphaseSample,
    char_poly_modulus_sq,
    fold_phases,
    haar_orthogonal,
    haar_special_orthogonal,
    haar_symplectic,
    inner_moment,
    mom_mc_estimate,
    quadrature_points,
    sample_phases,
    sample_so_eigenphases,
    sample_sp_eigenphases,
)

PI = math.pi


def _within(mean, se, target, sig=3.0):
    return abs(mean - target) <= sig * se


# -- characteristic polynomial and the inner integral -----------------------

def test_char_poly_examples():
    assert char_poly_modulus_sq(EigenphaseSample(np.array([PI / 2]), "sp"), 0.0) == pytest.approx(4.0)
    assert char_poly_modulus_sq([0.0], 0.0) == pytest.approx(0.0)
    assert char_poly_modulus_sq([PI / 2], PI / 2) == pytest.approx(0.0, abs=1e-15)


@given(st.lists(st.floats(0, PI), min_size=1, max_size=4), st.floats(-10, 10))
def test_char_poly_even_in_theta(phases, theta):
    assert char_poly_modulus_sq(phases, theta) == char_poly_modulus_sq(phases, -theta)
    assert char_poly_modulus_sq(phases, theta) >= 0


def test_char_poly_matches_determinant():
    rng = np.random.default_rng(5)
    g = haar_symplectic(2, 1, rng)[0]
    phases = fold_phases(np.linalg.eigvals(g))
    for theta in (0.0, 0.4, 2.2):
        det = np.linalg.det(np.eye(4) - g * np.exp(-1j * theta))
        assert char_poly_modulus_sq(phases, theta) == pytest.approx(abs(det) ** 2, rel=1e-9)


@pytest.mark.parametrize("phi", [0.0, 0.3, PI / 2, 2.0, PI])
def test_inner_moment_closed_form(phi):
    # mean over theta of (2-2cos(phi-theta))(2-2cos(phi+theta)) = 4 + 2cos(2 phi)
    assert inner_moment([phi], 1) == pytest.approx(4 + 2 * math.cos(2 * phi), abs=1e-10)


def test_inner_moment_named_points():
    assert inner_moment([PI / 2], 1) == pytest.approx(2.0, abs=1e-10)
    assert inner_moment([0.0], 1) == pytest.approx(6.0, abs=1e-10)


@given(st.lists(st.floats(0, PI), min_size=1, max_size=3), st.integers(1, 3))
def test_quadrature_refinement_invariant(phases, beta):
    n = len(phases)
    base = inner_moment(phases, beta)
    assert quadrature_points(n, beta) == 4 * n * beta + 2
    for m in (2 * n * beta + 1, 2 * quadrature_points(n, beta), 97):
        assert inner_moment(phases, beta, points=m) == pytest.approx(base, rel=1e-12, abs=1e-12)


def test_inner_moment_bad_beta():
    with pytest.raises(InvalidArgumentError):
        inner_moment([0.1], 0)


def test_inner_moment_vectorised():
    phases = np.array([[0.0], [PI / 2]])
    assert np.allclose(inner_moment(phases, 1), [6.0, 2.0])


# -- samplers ---------------------------------------------------------------

def test_fold_phases():
    ev = np.exp(1j * np.array([0.5, -0.5, 2.0, -2.0]))
    assert np.allclose(fold_phases(ev), [0.5, 2.0])


def test_orthogonal_sampler_is_orthogonal():
    rng = np.random.default_rng(1)
    q = haar_orthogonal(4, 200, rng)
    eye = np.eye(4)
    assert np.allclose(q.transpose(0, 2, 1) @ q, eye, atol=1e-10)
    dets = np.linalg.det(q)
    assert np.allclose(np.abs(dets), 1, atol=1e-8)
    assert (dets < 0).any() and (dets > 0).any()
    so = haar_special_orthogonal(4, 200, rng)
    assert np.allclose(np.linalg.det(so), 1, atol=1e-8)


def test_symplectic_sampler_structure():
    rng = np.random.default_rng(2)
    u = haar_symplectic(3, 50, rng)
    n = 3
    j = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
    eye = np.eye(2 * n)
    assert np.allclose(np.conj(u.transpose(0, 2, 1)) @ u, eye, atol=1e-10)
    assert np.allclose(u.transpose(0, 2, 1) @ j @ u, j, atol=1e-10)


def test_sampler_shapes():
    rng = np.random.default_rng(3)
    s = sample_so_eigenphases(3, rng)
    assert s.phases.shape == (3,) and s.group == "so"
    assert np.all((s.phases >= 0) & (s.phases <= PI))
    t = sample_sp_eigenphases(2, rng)
    assert t.phases.shape == (2,) and t.group == "sp"
    with pytest.raises(InvalidArgumentError):
        sample_phases("sp", 0, 1, rng)


def _mean_se(x):
    return x.mean(), x.std(ddof=1) / math.sqrt(len(x))


def test_so2_phase_uniform():
    phi = sample_phases("so", 1, 100_000, np.random.default_rng(10))[:, 0]
    assert _within(*_mean_se(np.cos(phi)), 0.0)


def test_so4_trace_moments():
    # E[Tr g] = 0 and E[(Tr g)^2] = 1: the defining representation is irreducible and real
    phi = sample_phases("so", 2, 100_000, np.random.default_rng(11))
    tr = 2 * np.cos(phi).sum(axis=1)
    assert _within(*_mean_se(tr), 0.0)
    assert _within(*_mean_se(tr ** 2), 1.0)


def test_so_first_order_from_character_average():
    # coefficient of x in E[det(I - x g)] is -E[Tr g]; the character average gives 1 + x^(2N)
    x = 1e-4
    linear = (bump_gamburd_average("so", 2, [x]) - 1) / x
    assert abs(linear) < 1e-6


def test_sp2_weyl_density_moments():
    phi = sample_phases("sp", 1, 100_000, np.random.default_rng(12))[:, 0]
    assert _within(*_mean_se(np.cos(phi)), 0.0)
    assert _within(*_mean_se(np.cos(2 * phi)), -0.5)


def test_sp2_det_average():
    phi = sample_phases("sp", 1, 100_000, np.random.default_rng(13))[:, 0]
    # det(I - x g) = (1 - x e^{i phi})(1 - x e^{-i phi})
    vals = 1 - 2 * 0.5 * np.cos(phi) + 0.25
    assert _within(*_mean_se(vals), 1.25)
    assert bump_gamburd_average("sp", 1, [0.5]) == pytest.approx(1.25)


# -- estimator --------------------------------------------------------------

@pytest.mark.parametrize("group,n,k,beta,target", [
    ("sp", 1, 1, 1, 3.0), ("so", 1, 1, 1, 4.0), ("so", 2, 2, 1, 72.0)])
def test_mom_examples(group, n, k, beta, target):
    est = mom_mc_estimate(group, n, k, beta, 100_000, 0x5EED)
    assert _within(est.mean, est.standard_error, target)
    assert est.mean >= 0


def test_estimator_consistency_over_seeds():
    misses = 0
    for group in ("sp", "so"):
        for n in (1, 2):
            for k in (1, 2):
                for beta in (1, 2):
                    exact = count_constrained(group, n, k, beta).value
                    for seed in range(20):
                        e = mom_mc_estimate(group, n, k, beta, 20_000, seed)
                        misses += not _within(e.mean, e.standard_error, exact)
    # at least 99% of the 320 seeded runs must bracket the exact value
    assert misses <= 3


def test_determinism_and_threads():
    a = mom_mc_estimate("sp", 2, 1, 1, 10_000, 9, threads=1, chunk=1000)
    b = mom_mc_estimate("sp", 2, 1, 1, 10_000, 9, threads=4, chunk=1000)
    c = mom_mc_estimate("sp", 2, 1, 1, 10_000, 9, chunk=1000)
    assert a == b == c
    assert mom_mc_estimate("sp", 2, 1, 1, 10_000, 10, chunk=1000).mean != a.mean


def test_csv_stream():
    buf = io.StringIO()
    est = mom_mc_estimate("so", 1, 2, 1, 50, 4, csv_out=buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "inner_moment"
    assert len(lines) == 51
    inner = np.array([float(v) for v in lines[1:]])
    assert np.mean(inner ** 2) == pytest.approx(est.mean, rel=1e-12)


def test_estimate_json_and_errors():
    d = mom_mc_estimate("sp", 1, 1, 1, 100, 1).to_json()
    assert set(d) == {"group", "N", "k", "beta", "samples", "seed", "mean", "stderr"}
    with pytest.raises(InvalidArgumentError):
        mom_mc_estimate("sp", 1, 1, 1, 1, 1)
