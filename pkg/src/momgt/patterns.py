"""Signatures, interlacing and symplectic / orthogonal Gelfand-Tsetlin patterns.

A signature is stored as a tuple of ints in non-increasing order.  A pattern
is a tuple of rows ``rows[0] .. rows[n-1]``; row ``i`` (1-based) has length
``(i + 1) // 2``.  In orthogonal patterns the last entry of every odd row
(the "odd starter") may be negative.  All indices in reports are 1-based.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import InvalidArgumentError

Signature = tuple[int, ...]
Rows = tuple[Signature, ...]


def signature(entries: Sequence[int]) -> Signature:
    sig = tuple(int(v) for v in entries)
    for a, b in zip(sig, sig[1:]):
        if a < b:
            raise InvalidArgumentError(f"signature {sig} is not non-increasing")
    return sig


def rectangular(n: int, m: int) -> Signature:
    """The signature <n^m>."""
    return (int(n),) * m


def flip_last(sig: Sequence[int]) -> Signature:
    """Negate the last entry (the lambda^- construction)."""
    sig = tuple(sig)
    if not sig:
        return sig
    return sig[:-1] + (-sig[-1],)


def sgn(v: int) -> int:
    return -1 if v < 0 else 1


def row_length(i: int) -> int:
    return (i + 1) // 2


def interlaces(lower: Sequence[int], upper: Sequence[int]) -> bool:
    """True iff ``lower`` interlaces ``upper``: nu_1 >= lam_1 >= nu_2 >= ..."""
    m = len(lower)
    if len(upper) not in (m, m + 1):
        raise InvalidArgumentError(
            f"cannot interlace rows of lengths {m} and {len(upper)}")
    for i in range(m):
        if upper[i] < lower[i]:
            return False
        if i + 1 < len(upper) and lower[i] < upper[i + 1]:
            return False
    return True


def _ranges_above(previous: Signature, target_length: int, ceiling: int):
    m = len(previous)
    out = []
    for i in range(target_length):
        hi = ceiling if i == 0 else previous[i - 1]
        lo = previous[i] if i < m else 0
        out.append(range(lo, min(hi, ceiling) + 1))
    return out


def iterate_interlacing_rows(previous: Sequence[int], target_length: int,
                             ceiling: int) -> Iterator[Signature]:
    """Yield non-negative rows ``nu`` with ``previous < nu``, entries <= ceiling.

    Rows come out in lexicographic order.
    """
    previous = tuple(previous)
    if target_length not in (len(previous), len(previous) + 1):
        raise InvalidArgumentError("target_length must be len(previous) or +1")
    if target_length == 0:
        yield ()
        return
    yield from itertools.product(*_ranges_above(previous, target_length, ceiling))


def iterate_rows_below(upper: Sequence[int], target_length: int) -> Iterator[Signature]:
    """Yield non-negative rows ``lam`` with ``lam < upper``, lexicographic order."""
    upper = tuple(upper)
    m = len(upper)
    if target_length not in (m, m - 1):
        raise InvalidArgumentError("target_length must be len(upper) or -1")
    ranges = []
    for i in range(target_length):
        lo = upper[i + 1] if i + 1 < m else 0
        ranges.append(range(max(lo, 0), upper[i] + 1))
    yield from itertools.product(*ranges)


@dataclass(frozen=True)
class Violation:
    row: int
    column: int | None
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def _as_rows(p) -> Rows:
    rows = p.rows if hasattr(p, "rows") else p
    return tuple(tuple(int(v) for v in r) for r in rows)


def _shape_violations(rows: Rows) -> list[Violation]:
    out = []
    for i, r in enumerate(rows, start=1):
        if len(r) != row_length(i):
            out.append(Violation(i, None, f"row has length {len(r)}, expected {row_length(i)}"))
    return out


def _first_chain_break(lower: Signature, upper: Signature) -> int | None:
    """1-based column in ``lower`` where interlacing first fails."""
    for i in range(len(lower)):
        if upper[i] < lower[i]:
            return i + 1
        if i + 1 < len(upper) and lower[i] < upper[i + 1]:
            return i + 1
    return None


def validate_symplectic(p) -> ValidationReport:
    rows = _as_rows(p)
    if len(rows) % 2:
        return ValidationReport((Violation(len(rows), None, "symplectic pattern needs even length"),))
    bad = _shape_violations(rows)
    if bad:
        return ValidationReport(tuple(bad))
    out = []
    for i, r in enumerate(rows, start=1):
        for c, v in enumerate(r, start=1):
            if v < 0:
                out.append(Violation(i, c, f"negative entry {v}"))
                break
        else:
            if any(a < b for a, b in zip(r, r[1:])):
                out.append(Violation(i, None, "row is not non-increasing"))
            elif i > 1:
                col = _first_chain_break(rows[i - 2], r)
                if col is not None:
                    out.append(Violation(i - 1, col, f"rows {i - 1}-{i} do not interlace"))
    return ValidationReport(tuple(out))


def _abs_adjusted(rows: Rows) -> Rows:
    out = []
    for i, r in enumerate(rows, start=1):
        if i % 2 and r:
            r = r[:-1] + (abs(r[-1]),)
        out.append(r)
    return tuple(out)


def validate_orthogonal(p) -> ValidationReport:
    rows = _as_rows(p)
    if len(rows) % 2 == 0:
        return ValidationReport((Violation(len(rows), None, "orthogonal pattern needs odd length"),))
    bad = _shape_violations(rows)
    if bad:
        return ValidationReport(tuple(bad))
    adj = _abs_adjusted(rows)
    out = []
    for i, r in enumerate(rows, start=1):
        starter = i % 2 == 1
        body = r[:-1] if starter else r
        neg = [c for c, v in enumerate(body, start=1) if v < 0]
        if neg:
            out.append(Violation(i, neg[0], f"negative entry {r[neg[0] - 1]}"))
            continue
        if any(a < b for a, b in zip(adj[i - 1], adj[i - 1][1:])):
            out.append(Violation(i, None, "row is not non-increasing"))
            continue
        if starter:
            j = (i + 1) // 2
            bounds = []
            if i > 1:
                bounds.append(rows[i - 2][j - 2])
            if i < len(rows):
                bounds.append(rows[i][j - 1])
            if bounds and abs(r[-1]) > min(bounds):
                out.append(Violation(i, j, f"odd starter |{r[-1]}| exceeds bound {min(bounds)}"))
                continue
        if i > 1:
            col = _first_chain_break(adj[i - 2], adj[i - 1])
            if col is not None:
                out.append(Violation(i - 1, col, f"rows {i - 1}-{i} do not interlace"))
    return ValidationReport(tuple(out))


@dataclass(frozen=True)
class SymplecticPattern:
    rows: Rows

    def __init__(self, rows):
        object.__setattr__(self, "rows", _as_rows(rows))
        report = validate_symplectic(self.rows)
        if not report.ok:
            raise InvalidArgumentError(f"invalid symplectic pattern: {report.violations[0]}")

    @property
    def top(self) -> Signature:
        return self.rows[-1] if self.rows else ()


@dataclass(frozen=True)
class OrthogonalPattern:
    rows: Rows

    def __init__(self, rows):
        object.__setattr__(self, "rows", _as_rows(rows))
        report = validate_orthogonal(self.rows)
        if not report.ok:
            raise InvalidArgumentError(f"invalid orthogonal pattern: {report.violations[0]}")

    @property
    def top(self) -> Signature:
        return self.rows[-1]


def sp_weight_exponents(p) -> tuple[int, ...]:
    rows = _as_rows(p)
    if not validate_symplectic(rows).ok:
        raise InvalidArgumentError("invalid symplectic pattern")
    sums = [0] + [sum(r) for r in rows]
    return tuple(sums[2 * i] - 2 * sums[2 * i - 1] + sums[2 * i - 2]
                 for i in range(1, len(rows) // 2 + 1))


def o_weight_exponents(p) -> tuple[int, ...]:
    rows = _as_rows(p)
    if not validate_orthogonal(rows).ok:
        raise InvalidArgumentError("invalid orthogonal pattern")
    return _o_exponents_unchecked(rows)


def _o_exponents_unchecked(rows: Rows) -> tuple[int, ...]:
    # abs row sums, indexed so that sums[r + 1] is row r and rows -1, 0 are empty
    sums = [0, 0] + [sum(abs(v) for v in r) for r in rows]
    starters = [1] + [sgn(rows[2 * i - 2][-1]) for i in range(1, (len(rows) + 1) // 2 + 1)]
    out = []
    for i in range(1, (len(rows) + 1) // 2 + 1):
        bracket = sums[2 * i] - 2 * sums[2 * i - 1] + sums[2 * i - 2]
        out.append(starters[i] * starters[i - 1] * bracket)
    return tuple(out)


def iterate_symplectic_patterns(top: Sequence[int]) -> Iterator[Rows]:
    """All symplectic patterns with the given top row (length 2 * len(top))."""
    top = signature(top)
    n = 2 * len(top)

    def rec(row_index: int, upper: Signature, acc: list):
        if row_index == 0:
            yield tuple(reversed(acc))
            return
        for r in iterate_rows_below(upper, row_length(row_index)):
            acc.append(r)
            yield from rec(row_index - 1, r, acc)
            acc.pop()

    yield from rec(n - 1, top, [top])


def iterate_orthogonal_patterns(top: Sequence[int]) -> Iterator[Rows]:
    """All orthogonal patterns with top row ``top`` (its last entry is the starter)."""
    top = tuple(int(v) for v in top)
    n = 2 * len(top) - 1

    def rec(row_index: int, upper_abs: Signature, acc: list):
        if row_index == 0:
            yield tuple(reversed(acc))
            return
        for r in iterate_rows_below(upper_abs, row_length(row_index)):
            acc.append(r)
            if row_index % 2 and r[-1] != 0:
                yield from rec(row_index - 1, r, acc)
                acc[-1] = r[:-1] + (-r[-1],)
                yield from rec(row_index - 1, r, acc)
            else:
                yield from rec(row_index - 1, r, acc)
            acc.pop()

    upper = top[:-1] + (abs(top[-1]),)
    if any(a < b for a, b in zip(upper, upper[1:])) or (len(top) > 1 and min(top[:-1]) < 0):
        raise InvalidArgumentError(f"bad orthogonal top row {top}")
    yield from rec(n - 1, upper, [top])
