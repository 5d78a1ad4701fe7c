"""Exact rational polynomials in N: interpolation, evaluation, certification.

Coefficients are ``fractions.Fraction`` (always in lowest terms), stored in
ascending degree.  The JSON form is
``{"degree": d, "coefficients": ["p/q", ...]}``; the zero polynomial has
degree -1 and no coefficients.
"""
from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Iterable, Sequence

from .characters import SO, SP, normalize_group
from .errors import IntegrityError, InvalidArgumentError
from .lattice import Limits, count_constrained, expected_degree

GOLDEN_SHA256 = "ccec9fd3e630a752a32856b284e238e244958ead87c37e15d0532f674f77184d"
GOLDEN_ENTRIES = (
    (SP, 1, 1), (SP, 1, 2), (SP, 1, 3), (SP, 2, 1), (SP, 3, 1),
    (SO, 1, 1), (SO, 1, 2), (SO, 1, 3), (SO, 2, 1), (SO, 3, 1),
)


@dataclass(frozen=True)
class ExactPolynomial:
    coefficients: tuple[Fraction, ...]

    def __init__(self, coefficients: Iterable = ()):
        coeffs = [Fraction(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> Fraction:
        return self.coefficients[-1] if self.coefficients else Fraction(0)

    def __call__(self, n) -> Fraction:
        return evaluate(self, n)

    def to_json(self) -> dict:
        return {"degree": self.degree, "coefficients": [str(c) for c in self.coefficients]}

    @classmethod
    def from_json(cls, data: dict) -> "ExactPolynomial":
        poly = cls(Fraction(c) for c in data["coefficients"])
        if poly.degree != int(data["degree"]):
            raise InvalidArgumentError("degree field disagrees with coefficient list")
        return poly

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        terms = []
        for d, c in enumerate(self.coefficients):
            if c == 0:
                continue
            mono = "" if d == 0 else ("N" if d == 1 else f"N^{d}")
            terms.append(f"{c}" if not mono else (mono if c == 1 else f"({c})*{mono}"))
        return " + ".join(reversed(terms))


def evaluate(p: ExactPolynomial, n) -> Fraction:
    acc = Fraction(0)
    x = Fraction(n)
    for c in reversed(p.coefficients):
        acc = acc * x + c
    return acc


def _poly_mul_linear(coeffs: list[Fraction], root: Fraction) -> list[Fraction]:
    """Multiply an ascending coefficient list by (N - root)."""
    out = [Fraction(0)] * (len(coeffs) + 1)
    for i, c in enumerate(coeffs):
        out[i + 1] += c
        out[i] -= root * c
    return out


def interpolate(samples: Sequence[tuple[int, int]]) -> ExactPolynomial:
    """Newton divided differences over exact rationals."""
    xs = [Fraction(x) for x, _ in samples]
    if len(set(xs)) != len(xs):
        raise InvalidArgumentError("interpolation nodes must be distinct")
    table = [Fraction(y) for _, y in samples]
    n = len(xs)
    newton = []
    for level in range(n):
        newton.append(table[0])
        table = [(table[i + 1] - table[i]) / (xs[i + level + 1] - xs[i]) for i in range(len(table) - 1)]
    coeffs = [Fraction(0)]
    for level in range(n - 1, -1, -1):
        coeffs = _poly_mul_linear(coeffs, xs[level])
        coeffs[0] += newton[level]
    return ExactPolynomial(coeffs)


@dataclass(frozen=True)
class MomResult:
    group: str
    k: int
    beta: int
    polynomial: ExactPolynomial
    expected_degree: int
    counts: tuple[int, ...]

    @property
    def leading(self) -> Fraction:
        return self.polynomial.leading

    def to_json(self) -> dict:
        d = {"group": self.group, "k": self.k, "beta": self.beta,
             "expected_degree": self.expected_degree, "leading": str(self.leading)}
        d.update(self.polynomial.to_json())
        return d


def _counts(group: str, k: int, beta: int, nodes: Sequence[int], limits: Limits,
            threads: int) -> list[int]:
    def one(n):
        return count_constrained(group, n, k, beta, limits).value
    if threads <= 1:
        return [one(n) for n in nodes]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, nodes))


def certify(poly: ExactPolynomial, degree: int, check_node: int, check_value: int) -> None:
    if evaluate(poly, check_node) != check_value:
        raise IntegrityError(
            f"interpolant gives {evaluate(poly, check_node)} at N={check_node}, count is {check_value}")
    if poly.degree != degree:
        raise IntegrityError(f"degree {poly.degree} differs from expected {degree}")
    if poly.leading <= 0:
        raise IntegrityError(f"leading coefficient {poly.leading} is not positive")


def mom_polynomial(group: str, k: int, beta: int, limits: Limits | None = None,
                   threads: int = 1) -> MomResult:
    group = normalize_group(group)
    if k < 1 or beta < 1:
        raise InvalidArgumentError("need k >= 1 and beta >= 1")
    limits = limits or Limits()
    d = expected_degree(group, k, beta)
    values = _counts(group, k, beta, list(range(d + 2)), limits, threads)
    poly = interpolate(list(enumerate(values[:d + 1])))
    certify(poly, d, d + 1, values[d + 1])
    return MomResult(group, k, beta, poly, d, tuple(values))


def golden_key(group: str, k: int, beta: int) -> str:
    return f"{normalize_group(group)}({k},{beta})"


def load_golden(text: str | None = None, verify_checksum: bool = True) -> dict[str, ExactPolynomial]:
    if text is None:
        text = resources.files("momgt").joinpath("data/golden.json").read_text(encoding="utf-8")
    if verify_checksum:
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        if digest != GOLDEN_SHA256:
            raise IntegrityError(f"golden table checksum mismatch: {digest}")
    return {key: ExactPolynomial.from_json(v) for key, v in json.loads(text).items()}


_GOLDEN: dict[str, ExactPolynomial] | None = None


def reference_polynomial(group: str, k: int, beta: int) -> ExactPolynomial | None:
    global _GOLDEN
    if _GOLDEN is None:
        _GOLDEN = load_golden()
    return _GOLDEN.get(golden_key(group, k, beta))


def coefficient_diff(got: ExactPolynomial, want: ExactPolynomial) -> list[tuple[int, Fraction, Fraction]]:
    """(degree, got, want) for every coefficient that differs."""
    width = max(len(got.coefficients), len(want.coefficients))
    pad = lambda p: list(p.coefficients) + [Fraction(0)] * (width - len(p.coefficients))  # noqa: E731
    return [(d, a, b) for d, (a, b) in enumerate(zip(pad(got), pad(want))) if a != b]
