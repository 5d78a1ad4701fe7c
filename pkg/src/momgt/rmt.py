"""Haar sampling on SO(2N) and Sp(2N) and a Monte Carlo estimate of MoM.

The inner integral over theta is a trigonometric polynomial of degree 2N*beta
in theta, so averaging over M = 4N*beta + 2 equispaced points is exact.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .characters import SO, SP, normalize_group
from .errors import InvalidArgumentError, MomError

MAX_REDRAWS = 1000
DEFAULT_CHUNK = 4096


@dataclass(frozen=True)
class EigenphaseSample:
    phases: np.ndarray      # N representatives in [0, pi]
    group: str


@dataclass(frozen=True)
class MomEstimate:
    mean: float
    standard_error: float
    samples: int
    group: str
    n: int
    k: int
    beta: int
    seed: int

    def to_json(self) -> dict:
        return {"group": self.group, "N": self.n, "k": self.k, "beta": self.beta,
                "samples": self.samples, "seed": self.seed,
                "mean": self.mean, "stderr": self.standard_error}


def fold_phases(eigenvalues: np.ndarray) -> np.ndarray:
    """Map a (..., 2n) array of conjugate-paired eigenvalues to (..., n) phases in [0, pi]."""
    ang = np.sort(np.abs(np.angle(eigenvalues)), axis=-1)
    return ang[..., ::2]


def haar_orthogonal(n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Haar O(n) matrices via QR with a positive diagonal in R."""
    g = rng.standard_normal((size, n, n))
    q, r = np.linalg.qr(g)
    d = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    d[d == 0] = 1
    return q * d[:, None, :]


def haar_special_orthogonal(n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Haar SO(n): draw from O(n) and reject determinant -1."""
    out = []
    have = 0
    for _ in range(MAX_REDRAWS):
        q = haar_orthogonal(n, max(2 * (size - have), 8), rng)
        q = q[np.linalg.det(q) > 0][: size - have]
        out.append(q)
        have += len(q)
        if have == size:
            return np.concatenate(out)
    raise MomError("SO(2N) rejection sampler exceeded its redraw cap")


def _partner(v: np.ndarray) -> np.ndarray:
    """J v-bar: the second complex column of the quaternion spanned by v."""
    n = v.shape[-1] // 2
    p, q = v[..., :n], v[..., n:]
    return np.concatenate([-np.conj(q), np.conj(p)], axis=-1)


def haar_symplectic(n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Haar USp(2n) by quaternionic Gram-Schmidt on Gaussian quaternion columns.

    Column j pairs with column n + j as (u, J u-bar), so U^T J U = J with
    J = [[0, I], [-I, 0]].
    """
    cols: list[np.ndarray] = []
    partners: list[np.ndarray] = []
    for _ in range(n):
        for _attempt in range(MAX_REDRAWS):
            v = (rng.standard_normal((size, 2 * n)) + 1j * rng.standard_normal((size, 2 * n))) / math.sqrt(2)
            for u in cols + partners:
                v = v - np.sum(np.conj(u) * v, axis=-1, keepdims=True) * u
            norm = np.linalg.norm(v, axis=-1, keepdims=True)
            if np.all(norm > 1e-10):
                break
        else:
            raise MomError("degenerate quaternionic Gram-Schmidt pivot")
        u = v / norm
        cols.append(u)
        partners.append(_partner(u))
    return np.stack(cols + partners, axis=-1)


def sample_phases(group: str, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    group = normalize_group(group)
    if n < 1 or size < 1:
        raise InvalidArgumentError("need n >= 1 and size >= 1")
    mats = haar_special_orthogonal(2 * n, size, rng) if group == SO else haar_symplectic(n, size, rng)
    return fold_phases(np.linalg.eigvals(mats))


def sample_so_eigenphases(n: int, rng: np.random.Generator) -> EigenphaseSample:
    return EigenphaseSample(sample_phases(SO, n, 1, rng)[0], SO)


def sample_sp_eigenphases(n: int, rng: np.random.Generator) -> EigenphaseSample:
    return EigenphaseSample(sample_phases(SP, n, 1, rng)[0], SP)


def _phases(sample) -> np.ndarray:
    return np.asarray(sample.phases if isinstance(sample, EigenphaseSample) else sample, dtype=float)


def char_poly_modulus_sq(sample, theta) -> np.ndarray | float:
    """|det(I - g e^{-i theta})|^2 from the folded phases; broadcasts over theta."""
    phi = _phases(sample)
    th = np.asarray(theta, dtype=float)
    diff = phi[..., :, None] - th[..., None, :] if th.ndim else phi - th
    summ = phi[..., :, None] + th[..., None, :] if th.ndim else phi + th
    vals = np.prod((2 - 2 * np.cos(diff)) * (2 - 2 * np.cos(summ)), axis=-2 if th.ndim else -1)
    return vals if th.ndim else float(vals)


def quadrature_points(n: int, beta: int) -> int:
    return 4 * n * beta + 2


def inner_moment(sample, beta: int, points: int | None = None) -> np.ndarray | float:
    """(1/2pi) * integral of |P(theta)|^(2 beta), exact by equispaced quadrature."""
    if beta < 1:
        raise InvalidArgumentError("need beta >= 1")
    phi = _phases(sample)
    n = phi.shape[-1]
    m = points or quadrature_points(n, beta)
    theta = 2 * np.pi * np.arange(m) / m
    vals = char_poly_modulus_sq(phi, theta) ** beta
    out = vals.mean(axis=-1)
    return out if np.ndim(out) else float(out)


def _chunk_values(group: str, n: int, beta: int, size: int,
                  seq: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seq))
    return inner_moment(sample_phases(group, n, size, rng), beta)


def mom_mc_estimate(group: str, n: int, k: int, beta: int, samples: int, seed: int,
                    threads: int = 1, chunk: int = DEFAULT_CHUNK,
                    csv_out: TextIO | None = None) -> MomEstimate:
    """Mean and standard error of inner_moment**k over Haar draws.

    Draws are split into fixed-size chunks; chunk c uses child c of
    SeedSequence(seed), so results do not depend on the thread count.
    """
    group = normalize_group(group)
    if n < 1 or k < 1 or beta < 1 or samples < 2:
        raise InvalidArgumentError("need n, k, beta >= 1 and samples >= 2")
    sizes = [min(chunk, samples - s) for s in range(0, samples, chunk)]
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))

    def run(i):
        return _chunk_values(group, n, beta, sizes[i], seqs[i])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    inner = np.concatenate(parts)
    if csv_out is not None:
        writer = csv.writer(csv_out, lineterminator="\n")
        writer.writerow(["inner_moment"])
        writer.writerows([repr(float(v))] for v in inner)
    values = inner ** k
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(samples))
    return MomEstimate(mean, se, samples, group, n, k, beta, seed)
