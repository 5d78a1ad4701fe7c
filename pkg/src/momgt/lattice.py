"""Exact counts of constrained symplectic / orthogonal Gelfand-Tsetlin patterns.

Three independent routes are provided:

* ``side="array"`` (default): a dense numpy dynamic programme over the
  relabelled integer arrays, with the linear constraints written directly
  on array rows.  Orthogonal counts are summed over sign vectors.
* ``side="pattern"``: a dictionary dynamic programme over the original
  pattern rows using :func:`build_constraints`; orthogonal odd starters are
  signed and the sign products are carried in the state.
* :func:`brute_force_count`: full enumeration with the weight exponents
  checked at the end.
"""
from __future__ import annotations

import itertools
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .characters import SO, SP, normalize_group
from .errors import InvalidArgumentError, ResourceLimitError
from .patterns import (
    Rows,
    _o_exponents_unchecked,
    iterate_orthogonal_patterns,
    iterate_symplectic_patterns,
    rectangular,
    row_length,
    sgn,
)

DEFAULT_MAX_STATES = 10**8
DEFAULT_MAX_BYTES = 2 * 2**30
DEFAULT_BRUTE_FORCE_CAP = 2_000_000
_INT64_SAFE = 2**62
# a transfer step holds about four full tables at once (prefix sums, output, corner term)
_LIVE_COPIES = 4
_OBJECT_SLOT = 48         # pointer plus a boxed multi-limb int


@dataclass(frozen=True)
class Limits:
    max_states: int = DEFAULT_MAX_STATES
    max_bytes: int = DEFAULT_MAX_BYTES
    brute_force_cap: int = DEFAULT_BRUTE_FORCE_CAP


@dataclass(frozen=True)
class CountResult:
    value: int
    group: str
    n: int
    k: int
    beta: int
    states: int = 0
    seconds: float = 0.0
    extra: dict = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict:
        d = {"group": self.group, "N": self.n, "k": self.k, "beta": self.beta,
             "value": self.value, "states": self.states, "seconds": round(self.seconds, 6)}
        d.update(self.extra)
        return d


def _check_params(n: int, k: int, beta: int):
    if n < 0 or k < 1 or beta < 1:
        raise InvalidArgumentError("need N >= 0, k >= 1, beta >= 1")


def _blocks(k: int, beta: int) -> list[tuple[range, range]]:
    """(plus range, minus range) of exponent indices for each constraint."""
    return [(range((2 * i - 2) * beta + 1, (2 * i - 1) * beta + 1),
             range((2 * i - 1) * beta + 1, 2 * i * beta + 1)) for i in range(1, k + 1)]


# ---------------------------------------------------------------------------
# constraints over pattern rows


@dataclass(frozen=True)
class ConstraintSystem:
    """k linear constraints on the weight exponents, expanded onto row sums.

    ``weights[i]`` maps exponent index j to +1 / -1.  For Sp the row
    coefficients are fixed; for SO they depend on the sign vector because
    exponent j carries the factor eps_j * eps_{j-1}.
    """
    group: str
    k: int
    beta: int
    weights: tuple[dict, ...]

    @property
    def n_rows(self) -> int:
        return 4 * self.k * self.beta - (1 if self.group == SO else 0)

    @property
    def n_vars(self) -> int:
        return 2 * self.k * self.beta

    @property
    def constraints(self) -> tuple[dict, ...]:
        return self.row_coefficients()

    def row_coefficients(self, signs: Sequence[int] | None = None) -> tuple[dict, ...]:
        if self.group == SP:
            if signs is not None:
                raise InvalidArgumentError("symplectic constraints take no signs")
            def parts(j):
                return ((2 * j, 1), (2 * j - 1, -2), (2 * j - 2, 1))
            factor = [1] * (self.n_vars + 1)
        else:
            signs = tuple(signs) if signs is not None else (1,) * self.n_vars
            if len(signs) != self.n_vars or any(s not in (1, -1) for s in signs):
                raise InvalidArgumentError(f"need {self.n_vars} signs in {{+1,-1}}")
            eps = (1,) + signs
            factor = [1] + [eps[j] * eps[j - 1] for j in range(1, self.n_vars + 1)]
            def parts(j):
                return ((2 * j - 1, 1), (2 * j - 2, -2), (2 * j - 3, 1))
        out = []
        for w in self.weights:
            coef: dict[int, int] = {}
            for j, c in w.items():
                for row, m in parts(j):
                    if row >= 1:
                        coef[row] = coef.get(row, 0) + c * m * factor[j]
            out.append(dict(sorted(coef.items())))
        return tuple(out)

    def holds(self, exponents: Sequence[int]) -> bool:
        return all(sum(c * exponents[j - 1] for j, c in w.items()) == 0 for w in self.weights)


def build_constraints(group: str, k: int, beta: int) -> ConstraintSystem:
    group = normalize_group(group)
    if k < 1 or beta < 1:
        raise InvalidArgumentError("need k >= 1 and beta >= 1")
    weights = []
    for plus, minus in _blocks(k, beta):
        w = {j: 1 for j in plus}
        w.update({j: -1 for j in minus})
        weights.append(w)
    return ConstraintSystem(group, k, beta, tuple(weights))


def exponent_blocks_hold(k: int, beta: int, exponents: Sequence[int]) -> bool:
    """Check the k block equalities directly on an exponent vector."""
    for plus, minus in _blocks(k, beta):
        if sum(exponents[j - 1] for j in plus) != sum(exponents[j - 1] for j in minus):
            return False
    return True


# ---------------------------------------------------------------------------
# relabelled arrays


@dataclass(frozen=True)
class RelabelledArray:
    rows: Rows
    n: int
    signs: tuple[int, ...] | None = None


def _sp_array_lengths(kb: int) -> list[int]:
    m = 2 * kb
    return [row_length(r) if r <= m else (2 * m - r + 1) // 2 for r in range(1, 2 * m)]


def _so_array_lengths(kb: int) -> list[int]:
    m = 2 * kb
    return [row_length(r) if r <= m - 1 else (2 * m - 1 - r) // 2 for r in range(1, 2 * m - 2)]


def _rows_of(p) -> Rows:
    rows = p.rows if hasattr(p, "rows") else p
    return tuple(tuple(int(v) for v in r) for r in rows)


def relabel_sp(p) -> RelabelledArray:
    rows = _rows_of(p)
    top = rows[-1]
    m = len(top)
    if len(rows) != 2 * m or m % 2 or len(set(top)) != 1:
        raise InvalidArgumentError("top row must be <N^(2k beta)> with 2 * len(top) rows")
    n = top[0]
    out = []
    for r, length in enumerate(_sp_array_lengths(m // 2), start=1):
        row = rows[r - 1]
        if r > m and any(v != n for v in row[:len(row) - length]):
            raise InvalidArgumentError(f"row {r} is not forced to N where required")
        out.append(row[len(row) - length:])
    return RelabelledArray(tuple(out), n)


def unrelabel_sp(a: RelabelledArray) -> Rows:
    n = a.n
    m = (len(a.rows) + 1) // 2
    rows = []
    for r, tail in enumerate(a.rows, start=1):
        rows.append((n,) * (row_length(r) - len(tail)) + tuple(tail))
    rows.append(rectangular(n, m))
    return tuple(rows)


def relabel_so(p, label: int | None = None) -> tuple[RelabelledArray, tuple[int, ...]]:
    """Return (array of absolute values, sign vector); ``label`` overrides the top sign."""
    rows = _rows_of(p)
    top = rows[-1]
    m = len(top)
    n = abs(top[0])
    if len(rows) != 2 * m - 1 or m % 2 or any(abs(v) != n for v in top) or min(top[:-1]) < 0:
        raise InvalidArgumentError("top row must be <N^(2k beta)> or its flip")
    if label is None:
        label = sgn(top[-1])
    signs = tuple(sgn(rows[2 * j - 2][-1]) for j in range(1, m)) + (label,)
    out = []
    for r, length in enumerate(_so_array_lengths(m // 2), start=1):
        row = rows[r - 1]
        body = row[:len(row) - length]
        if r >= m and any(abs(v) != n for v in body):
            raise InvalidArgumentError(f"row {r} is not forced to N where required")
        out.append(tuple(abs(v) for v in row[len(row) - length:]))
    if any(v != n for v in rows[-2]):
        raise InvalidArgumentError("second row from the top must be <N^(2k beta - 1)>")
    return RelabelledArray(tuple(out), n, signs), signs


def unrelabel_so(a: RelabelledArray) -> Rows:
    n, signs = a.n, a.signs
    m = len(signs)
    rows = []
    for r, tail in enumerate(a.rows, start=1):
        row = (n,) * (row_length(r) - len(tail)) + tuple(tail)
        if r % 2:
            row = row[:-1] + (signs[(r + 1) // 2 - 1] * row[-1],)
        rows.append(row)
    rows.append(rectangular(n, m - 1))
    top = rectangular(n, m)
    rows.append(top[:-1] + (signs[-1] * n,))
    return tuple(rows)


def array_constraints(group: str, k: int, beta: int,
                      signs: Sequence[int] | None = None) -> list[dict]:
    """Constraints written directly on relabelled-array rows.

    Lower brackets use rows 2j-2..2j (Sp) or 2j-3..2j-1 (SO); upper brackets
    are the mirror images.  Rows outside the array count as zero.
    """
    group = normalize_group(group)
    kb = k * beta
    if group == SP:
        n_rows = 4 * kb - 1
        def lower(j):
            return ((2 * j, 1), (2 * j - 1, -2), (2 * j - 2, 1))
        def upper(j):
            return ((4 * kb - 2 * j, 1), (4 * kb - 2 * j + 1, -2), (4 * kb - 2 * j + 2, 1))
        def f_low(j):
            return 1
        f_up = f_low
    else:
        n_rows = 4 * kb - 3
        if signs is None or len(signs) != 2 * kb:
            raise InvalidArgumentError(f"need a sign vector of length {2 * kb}")
        eps = (1,) + tuple(signs)
        def lower(j):
            return ((2 * j - 1, 1), (2 * j - 2, -2), (2 * j - 3, 1))
        def upper(j):
            return ((4 * kb - 2 * j - 1, 1), (4 * kb - 2 * j, -2), (4 * kb - 2 * j + 1, 1))
        def f_low(j):
            return eps[j] * eps[j - 1]
        def f_up(j):
            return eps[2 * kb - j + 1] * eps[2 * kb - j]

    def add(coef, terms, c):
        for row, m in terms:
            if 1 <= row <= n_rows:
                coef[row] = coef.get(row, 0) + c * m

    out = []
    for i in range(1, k // 2 + 1):
        plus, minus = _blocks(k, beta)[i - 1]
        low: dict[int, int] = {}
        for j in plus:
            add(low, lower(j), f_low(j))
        for j in minus:
            add(low, lower(j), -f_low(j))
        out.append(low)
    if k % 2:
        mid: dict[int, int] = {}
        for j in range((k - 1) * beta + 1, kb + 1):
            add(mid, lower(j), f_low(j))
            add(mid, upper(j), -f_up(j))
        out.append(mid)
    for i in range(k // 2, 0, -1):
        plus, minus = _blocks(k, beta)[i - 1]
        up: dict[int, int] = {}
        for j in plus:
            add(up, upper(j), f_up(j))
        for j in minus:
            add(up, upper(j), -f_up(j))
        out.append(up)
    return [dict(sorted(c.items())) for c in out]


# ---------------------------------------------------------------------------
# dense array-side dynamic programme


@dataclass
class _Layer:
    length: int
    relation: str          # "start", "up" (prev < row) or "down" (row < prev)
    lo: tuple[int, ...]
    hi: tuple[int, ...]
    coef: dict             # constraint id -> coefficient on the row sum
    starter_min: int = 0   # lower bound on the last entry (signed starters)


def _layers_from(lengths: list[int], middle: int, n: int, coefs: list[dict],
                 starter_min: dict | None = None) -> list[_Layer]:
    layers = []
    for r, length in enumerate(lengths, start=1):
        rel = "start" if r == 1 else ("up" if r <= middle else "down")
        coef = {c: m[r] for c, m in enumerate(coefs) if r in m}
        layers.append(_Layer(length, rel, (0,) * length, (n,) * length, coef,
                             (starter_min or {}).get(r, 0)))
    return layers


def _box_transfer(d: np.ndarray, m_prev: int, m_new: int, relation: str, n: int) -> np.ndarray:
    """Sum d[a, acc] over all rows a related to each row b; returns t[b, acc]."""
    acc = d.shape[-1]
    p = d
    for ax in range(m_prev):
        pad = [(0, 0)] * p.ndim
        pad[ax] = (1, 0)
        p = np.cumsum(np.pad(p, pad), axis=ax, dtype=d.dtype)
    grids = np.indices((n + 1,) * m_new, sparse=True)
    lo, hi = [], []
    for t in range(m_prev):
        if relation == "up":
            h = grids[t]
            l_ = grids[t + 1] if t + 1 < m_new else 0
        else:
            l_ = grids[t] if t < m_new else 0
            h = grids[t - 1] if t >= 1 else n
        lo.append(l_)
        hi.append(h)
    out = np.zeros((n + 1,) * m_new + (acc,), dtype=d.dtype)
    shape = (n + 1,) * m_new
    for corner in itertools.product((0, 1), repeat=m_prev):
        idx = []
        for t, use_lo in enumerate(corner):
            v = lo[t] if use_lo else np.add(hi[t], 1)
            idx.append(np.broadcast_to(np.clip(v, 0, n + 1), shape))
        term = p[tuple(idx)]
        if sum(corner) % 2:
            out -= term
        else:
            out += term
    return out


def _valid_mask(layer: _Layer, n: int) -> np.ndarray:
    g = np.indices((n + 1,) * layer.length, sparse=True)
    mask = np.ones((n + 1,) * layer.length, dtype=bool)
    for t in range(layer.length):
        mask &= (g[t] >= layer.lo[t]) & (g[t] <= layer.hi[t])
        if t + 1 < layer.length:
            mask &= g[t] >= g[t + 1]
    if layer.starter_min:
        mask &= g[layer.length - 1] >= layer.starter_min
    return mask


def _row_sums(length: int, n: int) -> np.ndarray:
    g = np.indices((n + 1,) * length, sparse=True)
    s = np.zeros((n + 1,) * length, dtype=np.int64)
    for t in range(length):
        s = s + g[t]
    return s


class _DenseCounter:
    """Row-by-row DP with one live accumulator axis (constraints overlap in one row)."""

    def __init__(self, layers: list[_Layer], n: int, n_constraints: int, limits: Limits):
        self.layers = layers
        self.n = n
        self.max_states = limits.max_states
        self.max_bytes = limits.max_bytes
        self.first = {}
        self.last = {}
        for i, layer in enumerate(layers):
            for c in layer.coef:
                self.first.setdefault(c, i)
                self.last[c] = i
        if set(self.first) != set(range(n_constraints)):
            raise InvalidArgumentError("every constraint must touch at least one row")
        self.maxsum = [layer.length * n for layer in layers]
        self.states = 0
        self.big = False

    def _range(self, c: int, i: int) -> tuple[int, int]:
        """Values of constraint c's accumulator after layer i that can still reach zero."""
        lo = hi = 0
        for t in range(self.first[c], i + 1):
            w = self.layers[t].coef.get(c, 0) * self.maxsum[t]
            lo, hi = lo + min(0, w), hi + max(0, w)
        rem = sum(abs(self.layers[t].coef.get(c, 0)) * self.maxsum[t]
                  for t in range(i + 1, self.last[c] + 1))
        return max(lo, -rem), min(hi, rem)

    def _guard(self, entries: int):
        if entries > self.max_states:
            raise ResourceLimitError(
                f"dense state table of {entries} entries exceeds cap {self.max_states}")
        need = entries * _LIVE_COPIES * (_OBJECT_SLOT if self.big else 8)
        if need > self.max_bytes:
            raise ResourceLimitError(
                f"dense state table needs about {need} bytes, over the {self.max_bytes} byte budget")

    def run(self) -> int:
        n = self.n
        d = None
        live = None          # (constraint id, acc_lo)
        for i, layer in enumerate(self.layers):
            grid = (n + 1) ** layer.length
            self._guard(grid)
            if d is None:
                t = np.ones((n + 1,) * layer.length + (1,), dtype=np.int64)
            else:
                prev_len = d.ndim - 1
                # transferred entries are bounded by the old total; corner sums by 2^m times it
                if d.dtype != object and d.sum(dtype=np.float64) >= _INT64_SAFE >> (prev_len + 1):
                    d = d.astype(object)
                    self.big = True
                self._guard(grid * d.shape[-1])
                t = _box_transfer(d, prev_len, layer.length, layer.relation, n)
            t *= _valid_mask(layer, n)[..., None]
            sums = _row_sums(layer.length, n).reshape(-1)
            flat = t.reshape(grid, t.shape[-1])

            # close the live accumulator if this is its last row
            old_lo = live[1] if live else 0
            cur = live[0] if live else None
            if cur is not None and self.last[cur] == i:
                w = layer.coef.get(cur, 0)
                keep = -w * sums - old_lo
                ok = (keep >= 0) & (keep < flat.shape[1])
                col = np.zeros(grid, dtype=flat.dtype)
                col[ok] = flat[np.nonzero(ok)[0], keep[ok]]
                flat = col[:, None]
                cur, old_lo = None, 0
            opening = [c for c in layer.coef if self.first[c] == i]
            if cur is not None and opening:
                raise InvalidArgumentError("layout needs two live accumulators")
            if cur is None and len(opening) > 1:
                raise InvalidArgumentError("layout opens two constraints in one row")
            target = cur if cur is not None else (opening[0] if opening else None)
            if target is not None:
                w = layer.coef.get(target, 0)
                lo, hi = self._range(target, i)
                width = hi - lo + 1
                self._guard(grid * max(width, 1))
                new = np.zeros((grid, max(width, 0)), dtype=flat.dtype)
                if width > 0:
                    for s in np.unique(sums):
                        rows = np.nonzero(sums == s)[0]
                        shift = int(w * s) + old_lo - lo
                        a0 = max(0, -shift)
                        a1 = min(flat.shape[1], width - shift)
                        if a1 > a0:
                            new[rows, a0 + shift:a1 + shift] = flat[rows, a0:a1]
                flat = new
                if self.last[target] == i:
                    zero = -lo
                    flat = flat[:, zero:zero + 1] if 0 <= zero < width else flat[:, :0]
                    if flat.shape[1] == 0:
                        flat = np.zeros((grid, 1), dtype=flat.dtype)
                    live = None
                else:
                    live = (target, lo)
            else:
                live = None
            d = flat.reshape((n + 1,) * layer.length + (flat.shape[1],))
            self.states += int(np.count_nonzero(d))
        if live is not None:
            raise InvalidArgumentError("a constraint was left open")
        if d.dtype == object or d.sum(dtype=np.float64) >= _INT64_SAFE:
            return int(d.sum(dtype=object))
        return int(d.sum())


def _sp_array_layers(n: int, k: int, beta: int) -> tuple[list[_Layer], int]:
    kb = k * beta
    coefs = array_constraints(SP, k, beta)
    return _layers_from(_sp_array_lengths(kb), 2 * kb, n, coefs), len(coefs)


def _so_array_layers(n: int, k: int, beta: int, signs: Sequence[int]) -> tuple[list[_Layer], int]:
    kb = k * beta
    coefs = array_constraints(SO, k, beta, signs)
    lengths = _so_array_lengths(kb)
    starter = {r: 1 for r in range(1, len(lengths) + 1, 2) if signs[(r + 1) // 2 - 1] < 0}
    return _layers_from(lengths, 2 * kb - 1, n, coefs, starter), len(coefs)


def _dense_count(layers, n_constraints, n, limits) -> tuple[int, int]:
    counter = _DenseCounter(layers, n, n_constraints, limits)
    value = counter.run()
    return value, counter.states


def _so_signs_feasible(n: int, signs: Sequence[int]) -> bool:
    # a negative starter needs |starter| >= 1, impossible when N = 0
    return n > 0 or all(s > 0 for s in signs[:-1])


# ---------------------------------------------------------------------------
# pattern-side dictionary dynamic programme


def _forced_lower_bounds(n: int, n_rows: int, top_len: int) -> list[tuple[int, ...]]:
    """lo[r-1][m]: entries of row r forced to be >= this by the fixed top row."""
    lo = [None] * n_rows
    lo[n_rows - 1] = (n,) * top_len
    for r in range(n_rows - 1, 0, -1):
        above = lo[r]
        length = row_length(r)
        lo[r - 1] = tuple(above[m + 1] if m + 1 < len(above) else 0 for m in range(length))
    return lo


def _next_rows(prev: tuple[int, ...], length: int, lo: tuple[int, ...], n: int,
               starter_min: int = 0):
    ranges = []
    for t in range(length):
        upper = n if t == 0 else prev[t - 1]
        lower = prev[t] if t < len(prev) else 0
        lower = max(lower, lo[t])
        if t == length - 1:
            lower = max(lower, starter_min)
        upper = min(upper, n)
        if lower > upper:
            return
        ranges.append(range(lower, upper + 1))
    yield from itertools.product(*ranges)


class _PatternCounter:
    def __init__(self, group: str, n: int, k: int, beta: int, limits: Limits,
                 signs: Sequence[int] | None = None):
        self.group, self.n, self.k, self.beta = group, n, k, beta
        self.limits = limits
        self.system = build_constraints(group, k, beta)
        self.signs = tuple(signs) if signs is not None else None
        self.n_rows = self.system.n_rows
        self.m = self.system.n_vars
        self.lo = _forced_lower_bounds(n, self.n_rows, self.m)
        self.states = 0

    def _spans(self, coefs: Iterable[dict]) -> tuple[dict, dict]:
        first, last = {}, {}
        for c, m in enumerate(coefs):
            first[c] = min(m)
            last[c] = max(m)
        return first, last

    def run(self) -> int:
        return self._run_sp() if self.group == SP else self._run_so()

    def _prune(self, accs: dict, r: int, remaining: dict) -> bool:
        return all(abs(v) <= remaining[c][r] for c, v in accs.items())

    def _remaining(self, bound_coef: list[dict], last: dict) -> dict:
        out = {}
        for c in range(len(bound_coef)):
            rem = [0] * (self.n_rows + 2)
            for r in range(self.n_rows, 0, -1):
                rem[r - 1] = rem[r] + abs(bound_coef[c].get(r, 0)) * row_length(r) * self.n
            out[c] = rem
        return out

    def _push(self, table, key, count):
        table[key] += count
        if len(table) > self.limits.max_states:
            raise ResourceLimitError(f"pattern DP exceeded {self.limits.max_states} states")

    def _run_sp(self) -> int:
        coefs = self.system.row_coefficients()
        first, last = self._spans(coefs)
        remaining = self._remaining(list(coefs), last)
        table = {((), ()): 1}
        for r in range(1, self.n_rows + 1):
            length = row_length(r)
            live = [c for c in range(self.k) if first[c] <= r <= last[c]]
            nxt = defaultdict(int)
            for (prev, accs), count in table.items():
                acc = dict(accs)
                for row in _next_rows(prev, length, self.lo[r - 1], self.n):
                    s = sum(row)
                    new = {c: acc.get(c, 0) + coefs[c].get(r, 0) * s for c in live}
                    if any(new[c] != 0 for c in live if last[c] == r):
                        continue
                    new = {c: v for c, v in new.items() if last[c] > r}
                    if not self._prune(new, r, remaining):
                        continue
                    self._push(nxt, (row, tuple(sorted(new.items()))), count)
            table = nxt
            self.states += len(table)
        return sum(table.values())

    def _run_so(self) -> int:
        # exponent j = s_j * (R(2j-1) - 2 R(2j-2) + R(2j-3)) with s_j = eps_j eps_{j-1}.
        # State bits (g, s): g = sign guessed for the next odd starter, s = g * previous sign.
        w = self.system.weights
        m = self.m
        cj = [[w[c].get(j, 0) for c in range(self.k)] for j in range(m + 2)]
        bound = [dict() for _ in range(self.k)]
        for c in range(self.k):
            for j, v in w[c].items():
                for row, mult in ((2 * j - 1, 1), (2 * j - 2, 2), (2 * j - 3, 1)):
                    if row >= 1:
                        bound[c][row] = bound[c].get(row, 0) + abs(v) * mult
        first = {c: min(bound[c]) for c in range(self.k)}
        last = {c: max(bound[c]) for c in range(self.k)}
        remaining = self._remaining(bound, last)

        def guesses(j):
            if self.signs is not None:
                return (self.signs[j - 1],)
            return (1, -1)

        table = defaultdict(int)
        for g in guesses(1):
            table[((), (g, g), ())] += 1
        for r in range(1, self.n_rows + 1):
            length = row_length(r)
            live = [c for c in range(self.k) if first[c] <= r <= last[c]]
            odd = r % 2 == 1
            j = (r + 1) // 2 if odd else r // 2 + 1   # bracket receiving the row with factor s
            nxt = defaultdict(int)
            for (prev, (g, s), accs), count in table.items():
                acc = dict(accs)
                is_top = r == self.n_rows
                smin = 1 if (odd and g < 0 and not is_top) else 0
                for row in _next_rows(prev, length, self.lo[r - 1], self.n, smin):
                    total = sum(row)
                    if odd:
                        options = [(None, None)] if is_top else [(g2, g * g2) for g2 in guesses(j + 1)]
                    else:
                        options = [(g, s)]
                    for g2, s2 in options:
                        new = {}
                        for c in live:
                            if odd:
                                delta = cj[j][c] * s * total
                                if not is_top:
                                    delta += cj[j + 1][c] * s2 * total
                            else:
                                delta = -2 * cj[j][c] * s * total
                            new[c] = acc.get(c, 0) + delta
                        if any(new[c] != 0 for c in live if last[c] == r):
                            continue
                        new = {c: v for c, v in new.items() if last[c] > r}
                        if not self._prune(new, r, remaining):
                            continue
                        bits = (g, s) if not odd else ((0, 0) if is_top else (g2, s2))
                        self._push(nxt, (row, bits, tuple(sorted(new.items()))), count)
            table = nxt
            self.states += len(table)
        return sum(table.values())


# ---------------------------------------------------------------------------
# public counting API


def _timed(fn):
    start = time.perf_counter()
    value, states = fn()
    return value, states, time.perf_counter() - start


def count_constrained_sp(n: int, k: int, beta: int, limits: Limits | None = None,
                         side: str = "array") -> CountResult:
    _check_params(n, k, beta)
    limits = limits or Limits()
    if side == "array":
        def run():
            layers, nc = _sp_array_layers(n, k, beta)
            return _dense_count(layers, nc, n, limits)
    elif side == "pattern":
        def run():
            c = _PatternCounter(SP, n, k, beta, limits)
            return c.run(), c.states
    else:
        raise InvalidArgumentError(f"unknown side {side!r}")
    value, states, secs = _timed(run)
    return CountResult(value, SP, n, k, beta, states, secs, {"side": side})


def sign_vectors(k: int, beta: int) -> Iterable[tuple[int, ...]]:
    return itertools.product((1, -1), repeat=2 * k * beta)


def count_constrained_so_signed(n: int, k: int, beta: int, signs: Sequence[int],
                                limits: Limits | None = None, side: str = "array") -> CountResult:
    _check_params(n, k, beta)
    signs = tuple(int(s) for s in signs)
    if len(signs) != 2 * k * beta or any(s not in (1, -1) for s in signs):
        raise InvalidArgumentError(f"need {2 * k * beta} signs in {{+1,-1}}")
    limits = limits or Limits()
    if side == "array":
        def run():
            if not _so_signs_feasible(n, signs):
                return 0, 0
            layers, nc = _so_array_layers(n, k, beta, signs)
            return _dense_count(layers, nc, n, limits)
    elif side == "pattern":
        def run():
            c = _PatternCounter(SO, n, k, beta, limits, signs)
            return c.run(), c.states
    else:
        raise InvalidArgumentError(f"unknown side {side!r}")
    value, states, secs = _timed(run)
    return CountResult(value, SO, n, k, beta, states, secs,
                       {"side": side, "epsilon": list(signs)})


def count_constrained_so(n: int, k: int, beta: int, limits: Limits | None = None,
                         side: str = "array") -> CountResult:
    _check_params(n, k, beta)
    limits = limits or Limits()
    if side == "array":
        def run():
            value = states = 0
            for signs in sign_vectors(k, beta):
                if not _so_signs_feasible(n, signs):
                    continue
                layers, nc = _so_array_layers(n, k, beta, signs)
                v, s = _dense_count(layers, nc, n, limits)
                value += v
                states += s
            return value, states
    elif side == "pattern":
        def run():
            c = _PatternCounter(SO, n, k, beta, limits)
            return c.run(), c.states
    else:
        raise InvalidArgumentError(f"unknown side {side!r}")
    value, states, secs = _timed(run)
    return CountResult(value, SO, n, k, beta, states, secs, {"side": side})


def count_constrained(group: str, n: int, k: int, beta: int, limits: Limits | None = None,
                      side: str = "array") -> CountResult:
    group = normalize_group(group)
    fn = count_constrained_sp if group == SP else count_constrained_so
    return fn(n, k, beta, limits, side)


def count_sp_fixed_top(n: int, s: int, limits: Limits | None = None) -> CountResult:
    """Number of (2s)-symplectic patterns with top row <n^s>."""
    if n < 0 or s < 1:
        raise InvalidArgumentError("need n >= 0 and s >= 1")
    limits = limits or Limits()

    def run():
        lo = _forced_lower_bounds(n, 2 * s, s)
        layers = []
        for r in range(1, 2 * s):
            length = row_length(r)
            layers.append(_Layer(length, "start" if r == 1 else "up", lo[r - 1], (n,) * length, {}))
        # the top row is fixed; its interlacing is encoded in the forced bounds
        return _dense_count(layers, 0, n, limits)

    value, states, secs = _timed(run)
    return CountResult(value, SP, n, 0, 0, states, secs, {"s": s})


def brute_force_count(group: str, n: int, k: int, beta: int,
                      limits: Limits | None = None) -> CountResult:
    """Enumerate every pattern with the required top row and test the weight exponents."""
    group = normalize_group(group)
    _check_params(n, k, beta)
    limits = limits or Limits()
    m = 2 * k * beta
    estimate = count_sp_fixed_top(n, m, Limits(max_states=limits.max_states, max_bytes=limits.max_bytes)).value
    if group == SO:
        estimate *= 2 * 2 ** m
    if estimate > limits.brute_force_cap:
        raise ResourceLimitError(
            f"brute force would visit up to {estimate} patterns (cap {limits.brute_force_cap})")
    start = time.perf_counter()
    value = seen = 0
    top = rectangular(n, m)
    if group == SP:
        for rows in iterate_symplectic_patterns(top):
            seen += 1
            sums = [0] + [sum(r) for r in rows]
            e = [sums[2 * i] - 2 * sums[2 * i - 1] + sums[2 * i - 2] for i in range(1, m + 1)]
            value += exponent_blocks_hold(k, beta, e)
    else:
        for label_top in (top, top[:-1] + (-n,)):
            for rows in iterate_orthogonal_patterns(label_top):
                seen += 1
                value += exponent_blocks_hold(k, beta, _o_exponents_unchecked(rows))
    return CountResult(value, group, n, k, beta, seen, time.perf_counter() - start,
                       {"side": "brute"})


def expected_degree(group: str, k: int, beta: int) -> int:
    group = normalize_group(group)
    kb = k * beta
    if group == SP:
        return kb * (2 * kb + 1) - k
    if k == 1 and beta == 1:
        return 1
    return kb * (2 * kb - 1) - k


__all__ = [
    "CountResult", "ConstraintSystem", "Limits", "RelabelledArray", "array_constraints",
    "brute_force_count", "build_constraints", "count_constrained", "count_constrained_so",
    "count_constrained_so_signed", "count_constrained_sp", "count_sp_fixed_top",
    "expected_degree", "relabel_so", "relabel_sp", "sign_vectors", "unrelabel_so",
    "unrelabel_sp",
]
