"""Symplectic and orthogonal Schur polynomials and the two averaging formulas.

Both Schur families are evaluated two ways: by summing pattern weights and
by the Weyl determinant quotient.  The averages of products of characteristic
polynomials are computed by the Schur route and by the sum over sign vectors.
"""
from __future__ import annotations

import itertools
from collections import Counter
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, NearSingularError, ResourceLimitError
from .patterns import (
    _o_exponents_unchecked,
    flip_last,
    iterate_orthogonal_patterns,
    iterate_symplectic_patterns,
    rectangular,
    signature,
)

TOLERANCE = 1e-12
DEFAULT_PATTERN_CAP = 2_000_000

SP = "sp"
SO = "so"


def normalize_group(group: str) -> str:
    g = str(group).lower()
    if g in ("sp", "symplectic"):
        return SP
    if g in ("so", "o", "orthogonal"):
        return SO
    raise InvalidArgumentError(f"unknown group {group!r}")


def _points(points) -> np.ndarray:
    x = np.asarray(points, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError("points must be finite")
    if np.any(x == 0):
        raise InvalidArgumentError("points must be nonzero")
    return x


def _check_request(nu, points):
    nu = signature(nu)
    x = _points(points)
    if len(nu) != len(x):
        raise InvalidArgumentError("need one point per signature entry")
    if nu and nu[-1] < 0:
        raise InvalidArgumentError("signature must be non-negative")
    return nu, x


def _sp_exponents(rows) -> tuple[int, ...]:
    sums = [0] + [sum(r) for r in rows]
    return tuple(sums[2 * i] - 2 * sums[2 * i - 1] + sums[2 * i - 2]
                 for i in range(1, len(rows) // 2 + 1))


def _weight_sum(exponent_counts: Counter, x: np.ndarray) -> complex:
    total = 0j
    for exps, mult in exponent_counts.items():
        total += mult * complex(np.prod(x ** np.asarray(exps)))
    return total


def _collect(patterns, exponents, cap: int) -> Counter:
    counts = Counter()
    seen = 0
    for rows in patterns:
        seen += 1
        if seen > cap:
            raise ResourceLimitError(f"pattern enumeration exceeded cap {cap}")
        counts[exponents(rows)] += 1
    return counts


def sp_schur_combinatorial(nu: Sequence[int], points, cap: int = DEFAULT_PATTERN_CAP) -> complex:
    nu, x = _check_request(nu, points)
    if not nu:
        return 1 + 0j
    counts = _collect(iterate_symplectic_patterns(nu), _sp_exponents, cap)
    return _weight_sum(counts, x)


def o_schur_combinatorial(nu: Sequence[int], points, cap: int = DEFAULT_PATTERN_CAP) -> complex:
    """Sum over patterns with top row nu and with top row nu^- (a multiset union)."""
    nu, x = _check_request(nu, points)
    if not nu:
        return 1 + 0j
    counts = Counter()
    for top in (nu, flip_last(nu)):
        counts.update(_collect(iterate_orthogonal_patterns(top), _o_exponents_unchecked, cap))
    return _weight_sum(counts, x)


def _ratio(num: np.ndarray, den: np.ndarray) -> complex:
    d = np.linalg.det(den)
    if abs(d) < TOLERANCE:
        raise NearSingularError(
            "denominator determinant below tolerance; use the combinatorial evaluation")
    return complex(np.linalg.det(num) / d)


def sp_schur_determinantal(nu: Sequence[int], points) -> complex:
    nu, x = _check_request(nu, points)
    m = len(nu)
    if m == 0:
        return 1 + 0j
    j = np.arange(1, m + 1)
    a = np.asarray(nu) + m - j + 1
    b = m - j + 1
    xi = x[:, None]
    return _ratio(xi ** a - xi ** (-a), xi ** b - xi ** (-b))


def o_schur_determinantal(nu: Sequence[int], points) -> complex:
    nu, x = _check_request(nu, points)
    m = len(nu)
    if m == 0:
        return 1 + 0j
    j = np.arange(1, m + 1)
    a = np.asarray(nu) + m - j
    b = m - j
    xi = x[:, None]
    return 2 * _ratio(xi ** a + xi ** (-a), xi ** b + xi ** (-b))


def sp_schur(nu, points) -> complex:
    try:
        return sp_schur_determinantal(nu, points)
    except NearSingularError:
        return sp_schur_combinatorial(nu, points)


def o_schur(nu, points) -> complex:
    try:
        return o_schur_determinantal(nu, points)
    except NearSingularError:
        return o_schur_combinatorial(nu, points)


def bump_gamburd_average(group: str, n: int, points) -> complex:
    """Haar average of prod_j det(I - x_j g) over Sp(2n) or SO(2n), via Schur functions."""
    group = normalize_group(group)
    x = _points(points)
    if n < 0 or len(x) < 1:
        raise InvalidArgumentError("need n >= 0 and at least one point")
    top = rectangular(n, len(x))
    schur = sp_schur(top, x) if group == SP else o_schur(top, x)
    return complex(np.prod(x) ** n * schur)


def cfkrs_average(group: str, n: int, points) -> complex:
    """The same average written as a sum over sign vectors."""
    group = normalize_group(group)
    x = _points(points)
    m = len(x)
    if n < 0 or m < 1:
        raise InvalidArgumentError("need n >= 0 and at least one point")
    total = 0j
    for eps in itertools.product((1, -1), repeat=m):
        e = np.asarray(eps)
        num = np.prod(x ** (e * n))
        den = 1 + 0j
        for i in range(m):
            for jj in range(i if group == SP else i + 1, m):
                factor = 1 - x[i] ** (-e[i]) * x[jj] ** (-e[jj])
                if abs(factor) < TOLERANCE:
                    raise NearSingularError("singular denominator factor; perturb the points")
                den *= factor
        total += num / den
    return complex(np.prod(x) ** n * total)
