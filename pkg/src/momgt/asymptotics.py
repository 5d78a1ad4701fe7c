"""Leading-order coefficients as polytope volumes.

The polytope lives on the relabelled-array coordinates scaled to [0, 1].
All but k coordinates are free; each remaining coordinate is solved from one
linear constraint, in a fixed order.  Volumes are estimated by plain
rejection sampling.  At the symmetry point the volume is exact.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .characters import SO, SP, normalize_group
from .errors import IntegrityError, InvalidArgumentError
from .lattice import (
    Limits,
    _so_array_lengths,
    _sp_array_lengths,
    build_constraints,
    count_sp_fixed_top,
    sign_vectors,
)
from .polynomials import ExactPolynomial, MomResult, certify, interpolate

RNG_ALGORITHM = "numpy PCG64, SeedSequence(seed, spawn_key=(stream,)) spawned per chunk"
DEFAULT_CHUNK = 1 << 16


@dataclass(frozen=True)
class Determined:
    row: int
    entry: int
    constraint: int          # index into PolytopeSpec.constraints


@dataclass(frozen=True)
class PolytopeSpec:
    group: str
    k: int
    beta: int
    epsilon: tuple[int, ...] | None
    row_lengths: tuple[int, ...]
    coords: tuple[tuple[int, int], ...]         # (row, entry), 1-based
    free_indices: tuple[tuple[int, int], ...]
    determined: tuple[Determined, ...]          # in solve order
    constraints: tuple[dict, ...]               # row -> coefficient on the row sum
    inequalities: tuple[tuple[int, int], ...]   # (a, b) means coords[a] >= coords[b]
    lattice_index: int = 1

    @property
    def dimension(self) -> int:
        return len(self.free_indices)

    @property
    def determined_indices(self) -> tuple[tuple[int, int], ...]:
        return tuple((d.row, d.entry) for d in self.determined)

    @property
    def degenerate(self) -> bool:
        # SO with k = beta = 1: the single constraint can vanish identically
        return self.dimension == 0


def _solve_plan(group: str, k: int, beta: int) -> list[tuple[int, int]]:
    """(pattern constraint index, array row solved) in solve order."""
    kb = k * beta
    shift = 1 if group == SO else 0
    last_row = 4 * kb - 1 - 2 * shift
    plan = [(i - 1, 4 * i * beta - shift) for i in range(1, k // 2 + 1)]
    if k % 2:
        plan.append(((k - 1) // 2, 2 * (k + 1) * beta - shift if k > 1 else last_row))
    for ip in range(k // 2, 0, -1):
        row = 4 * kb - 4 * (ip - 1) * beta - shift if ip > 1 else last_row
        plan.append((k - ip, row))
    return plan


def polytope_spec(group: str, k: int, beta: int, epsilon: Sequence[int] | None = None) -> PolytopeSpec:
    group = normalize_group(group)
    if k < 1 or beta < 1:
        raise InvalidArgumentError("need k >= 1 and beta >= 1")
    kb = k * beta
    if group == SO:
        if epsilon is None:
            raise InvalidArgumentError("orthogonal polytopes need a sign vector")
        epsilon = tuple(int(e) for e in epsilon)
        lengths = _so_array_lengths(kb)
        middle = 2 * kb - 1
    else:
        if epsilon is not None:
            raise InvalidArgumentError("symplectic polytopes take no sign vector")
        lengths = _sp_array_lengths(kb)
        middle = 2 * kb
    n_rows = len(lengths)
    full = build_constraints(group, k, beta).row_coefficients(epsilon)
    # forced N entries cancel inside every bracket, so only the array rows remain
    constraints = tuple({r: c for r, c in m.items() if r <= n_rows} for m in full)

    coords = tuple((r, e) for r in range(1, n_rows + 1) for e in range(1, lengths[r - 1] + 1))
    index = {c: i for i, c in enumerate(coords)}
    plan = _solve_plan(group, k, beta)
    determined = []
    degenerate = (group, k, beta) == (SO, 1, 1)
    for pos, (ci, row) in enumerate(plan):
        if constraints[ci].get(row, 0) == 0 and not degenerate:
            row = _fallback_row(constraints, plan, pos, {d.row for d in determined}, row)
        determined.append(Determined(row, lengths[row - 1], ci))
    det_set = {(d.row, d.entry) for d in determined}
    free = tuple(c for c in coords if c not in det_set)

    ineq = []
    for r in range(1, n_rows + 1):
        row = [index[(r, e)] for e in range(1, lengths[r - 1] + 1)]
        ineq.extend((a, b) for a, b in zip(row, row[1:]))
        if r == 1:
            continue
        prev = [index[(r - 1, e)] for e in range(1, lengths[r - 2] + 1)]
        lower, upper = (prev, row) if r <= middle else (row, prev)
        for t, lam in enumerate(lower):
            ineq.append((upper[t], lam))
            if t + 1 < len(upper):
                ineq.append((lam, upper[t + 1]))
    spec = PolytopeSpec(group, k, beta, epsilon, tuple(lengths), coords, free,
                        tuple(determined), constraints, tuple(ineq))
    if not degenerate:
        object.__setattr__(spec, "lattice_index", _lattice_index(spec))
    return spec


def _fallback_row(constraints, plan, pos, taken: set, designated: int) -> int:
    """Pivot row when the designated coefficient vanishes for this sign vector.

    Picks the row nearest the designated one that has a nonzero coefficient,
    is not already solved and is untouched by constraints solved later.
    """
    ci = plan[pos][0]
    later = set()
    for cj, _ in plan[pos + 1:]:
        later.update(r for r, c in constraints[cj].items() if c)
    rows = [r for r, c in constraints[ci].items() if c and r not in taken and r not in later]
    if not rows:
        raise IntegrityError(f"constraint {ci + 1} has no usable pivot")
    return min(rows, key=lambda r: (abs(r - designated), -r))


def _lattice_index(spec: "PolytopeSpec") -> int:
    """Index in Z^dim of the projection of the constrained integer lattice.

    Each integer point of the constrained lattice projects to one integer
    point of the free coordinates, but only 1 / index of those lift back to
    integers, so the lattice-point density of the polytope is volume / index.
    """
    index = {c: i for i, c in enumerate(spec.coords)}
    k = len(spec.determined)
    a = [[Fraction(0)] * len(spec.coords) for _ in range(k)]
    for ci, coef in enumerate(spec.constraints):
        for (r, e), i in index.items():
            a[ci][i] = Fraction(coef.get(r, 0))
    det_cols = [index[(d.row, d.entry)] for d in spec.determined]
    b = [[a[ci][j] for j in det_cols] for ci in range(k)]
    if _exact_det(b) == 0:
        raise IntegrityError("determined coordinates are not independent")
    binv = _exact_inverse(b)
    free_cols = [index[c] for c in spec.free_indices]
    gens = set()
    for j in free_cols:
        col = tuple(sum(binv[r][t] * a[t][j] for t in range(k)) % 1 for r in range(k))
        if any(col):
            gens.add(col)
    group = {tuple(Fraction(0) for _ in range(k))}
    frontier = list(group)
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                x = tuple((u + v) % 1 for u, v in zip(g, h))
                if x not in group:
                    group.add(x)
                    nxt.append(x)
        frontier = nxt
    return len(group)


def _exact_inverse(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [v / piv for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [u - f * v for u, v in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class VolumeEstimate:
    mean: float
    standard_error: float
    samples: int
    seed: int
    accepted: int = 0
    dimension: int = 0
    lattice_index: int = 1
    rng: str = RNG_ALGORITHM

    def to_json(self, spec: PolytopeSpec | None = None) -> dict:
        d = {}
        if spec is not None:
            d.update({"group": spec.group, "k": spec.k, "beta": spec.beta})
            if spec.epsilon is not None:
                d["epsilon"] = list(spec.epsilon)
        d.update({"dimension": self.dimension, "samples": self.samples, "seed": self.seed,
                  "mean": self.mean, "stderr": self.standard_error})
        return d


def _accept_chunk(spec: PolytopeSpec, n: int, rng: np.random.Generator) -> int:
    index = {c: i for i, c in enumerate(spec.coords)}
    x = np.empty((n, len(spec.coords)))
    free_cols = [index[c] for c in spec.free_indices]
    x[:, free_cols] = rng.random((n, len(free_cols)))
    rows = {}
    for r, length in enumerate(spec.row_lengths, start=1):
        rows[r] = [index[(r, e)] for e in range(1, length + 1)]
    ok = np.ones(n, dtype=bool)
    for d in spec.determined:
        coef = spec.constraints[d.constraint]
        target = index[(d.row, d.entry)]
        rest = np.zeros(n)
        for r, c in coef.items():
            cols = [i for i in rows[r] if i != target]
            if cols and c:
                rest += c * x[:, cols].sum(axis=1)
        x[:, target] = -rest / coef[d.row]
        ok &= (x[:, target] >= 0) & (x[:, target] <= 1)
    ineq = np.asarray(spec.inequalities, dtype=np.intp).reshape(-1, 2)
    if len(ineq):
        ok &= np.all(x[:, ineq[:, 0]] >= x[:, ineq[:, 1]], axis=1)
    return int(ok.sum())


def mc_volume(spec: PolytopeSpec, samples: int, seed: int, threads: int = 1,
              stream: int = 0, chunk: int = DEFAULT_CHUNK) -> VolumeEstimate:
    """Rejection Monte Carlo.  Chunk c uses child c of SeedSequence(seed, spawn_key=(stream,)),
    so the estimate does not depend on the thread count."""
    if spec.dimension == 0:
        raise InvalidArgumentError("zero-dimensional polytope; the volume is a point measure")
    if samples < 1:
        raise InvalidArgumentError("need at least one sample")
    sizes = [min(chunk, samples - s) for s in range(0, samples, chunk)]
    children = np.random.SeedSequence(seed, spawn_key=(stream,)).spawn(len(sizes))

    def run(i):
        return _accept_chunk(spec, sizes[i], np.random.Generator(np.random.PCG64(children[i])))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            accepted = sum(pool.map(run, range(len(sizes))))
    else:
        accepted = sum(run(i) for i in range(len(sizes)))
    p = accepted / samples
    se = math.sqrt(p * (1 - p) / samples)
    idx = spec.lattice_index
    return VolumeEstimate(p / idx, se / idx, samples, seed, accepted, spec.dimension, idx)


@dataclass(frozen=True)
class SummedVolume:
    mean: float
    standard_error: float
    parts: tuple[tuple[tuple[int, ...], VolumeEstimate], ...]


def mc_volume_total(group: str, k: int, beta: int, samples: int, seed: int,
                    threads: int = 1) -> SummedVolume:
    """Sp: a single polytope.  SO: sum over sign vectors, each with its own RNG stream."""
    group = normalize_group(group)
    if group == SP:
        est = mc_volume(polytope_spec(SP, k, beta), samples, seed, threads)
        return SummedVolume(est.mean, est.standard_error, (((), est),))
    parts = []
    for stream, eps in enumerate(sign_vectors(k, beta)):
        parts.append((eps, mc_volume(polytope_spec(SO, k, beta, eps), samples, seed, threads, stream)))
    mean = sum(e.mean for _, e in parts)
    se = math.sqrt(sum(e.standard_error ** 2 for _, e in parts))
    return SummedVolume(mean, se, tuple(parts))


@dataclass(frozen=True)
class Comparison:
    status: str              # "PASS", "FAIL" or "SKIPPED"
    exact: Fraction | None
    estimate: float | None
    standard_error: float | None
    sigmas: float | None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "PASS"


def compare_to_estimate(exact: Fraction, mean: float, se: float, tol_sigma: float = 3.0) -> Comparison:
    diff = abs(float(exact) - mean)
    if se == 0:
        sig = 0.0 if diff == 0 else math.inf
    else:
        sig = diff / se
    return Comparison("PASS" if sig <= tol_sigma else "FAIL", exact, mean, se, sig)


def leading_coefficient_check(result: MomResult, volume=None, samples: int = 10**6,
                              seed: int = 0x5EED, threads: int = 1) -> Comparison:
    """Compare the exact leading coefficient with a volume (exact Fraction or MC estimate)."""
    if result.group == SO and result.k == 1 and result.beta == 1:
        return Comparison("SKIPPED", result.leading, None, None, None, "degenerate dimension-0 case")
    if isinstance(volume, Fraction):
        ok = volume == result.leading
        return Comparison("PASS" if ok else "FAIL", result.leading, float(volume), 0.0, None)
    if volume is None:
        volume = mc_volume_total(result.group, result.k, result.beta, samples, seed, threads)
    return compare_to_estimate(result.leading, volume.mean, volume.standard_error)


# ---------------------------------------------------------------------------
# symmetry point


def double_factorial(n: int) -> int:
    return 1 if n <= 0 else math.prod(range(n, 0, -2))


def half_pattern_volume(s: int, top: Sequence[float]) -> float:
    """Volume of continuous half patterns of length s under a fixed top row."""
    h = (s + 1) // 2
    x = [float(v) for v in top]
    if s < 1 or len(x) != h:
        raise InvalidArgumentError(f"need s >= 1 and a top row of length {h}")
    if any(a < b for a, b in zip(x, x[1:])) or (x and x[-1] < 0):
        raise InvalidArgumentError("top row must be non-increasing and non-negative")
    odd_shift = 1 if s % 2 == 0 else 0
    m = np.array([[x[h - i] ** (2 * j + odd_shift) for j in range(h)] for i in range(1, h + 1)])
    pref = 1.0 / math.prod(double_factorial(j - 1) for j in range(1, s + 1))
    return pref * float(np.linalg.det(m))


def _exact_det(m: list[list[Fraction]]) -> Fraction:
    m = [row[:] for row in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if m[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            for cc in range(c, n):
                m[r][cc] -= f * m[c][cc]
    return det


def vol_symmetry_point(s: int) -> Fraction:
    """Exact volume: two half patterns glued along a common top in [0,1].

    Integrating the product of two determinants over the ordered top gives a
    single Hankel-type determinant of moments 1 / (a + b + 1).
    """
    if s < 1:
        raise InvalidArgumentError("need s >= 1")
    h = (s + 1) // 2
    shift = 2 if s % 2 == 0 else 0
    m = [[Fraction(1, 2 * i + 2 * j - 3 + shift) for j in range(1, h + 1)] for i in range(1, h + 1)]
    pref = Fraction(1, math.prod(double_factorial(j - 1) for j in range(1, s + 1)) ** 2)
    return pref * _exact_det(m)


def symmetry_point_closed_form(s: int) -> Fraction:
    return Fraction(1, math.prod(double_factorial(2 * j - 1) for j in range(1, s + 1)))


@dataclass(frozen=True)
class SymmetryPointReport:
    s: int
    polynomial: ExactPolynomial
    leading: Fraction
    volume: Fraction

    @property
    def passed(self) -> bool:
        return self.leading == self.volume


def symmetry_point_leading_check(s: int, limits: Limits | None = None) -> SymmetryPointReport:
    degree = s * (s + 1) // 2
    counts = [count_sp_fixed_top(n, s, limits).value for n in range(degree + 2)]
    poly = interpolate(list(enumerate(counts[:degree + 1])))
    certify(poly, degree, degree + 1, counts[degree + 1])
    volume = vol_symmetry_point(s)
    if poly.leading != volume:
        raise IntegrityError(f"leading coefficient {poly.leading} differs from volume {volume}")
    return SymmetryPointReport(s, poly, poly.leading, volume)
