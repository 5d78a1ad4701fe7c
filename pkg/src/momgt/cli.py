"""``mom`` command-line interface.

Exit codes: 0 success, 1 usage or invalid argument, 2 resource cap,
3 integrity / verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import asymptotics, characters, lattice, polynomials, rmt
from .errors import IntegrityError, InvalidArgumentError, NearSingularError, ResourceLimitError

DEFAULT_SEED = 0x5EED
EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_INTEGRITY = 0, 1, 2, 3

DEFAULT_BUDGET = [("sp", 1, 1), ("sp", 2, 1), ("so", 1, 1), ("so", 2, 1), ("so", 1, 2), ("sp", 1, 2)]
LARGE_BUDGET = [("sp", 3, 1), ("so", 3, 1), ("so", 1, 3), ("sp", 1, 3)]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_range(text: str) -> list[int]:
    """'5' -> [5]; '0..3' -> [0, 1, 2, 3]; '1,4,7' -> [1, 4, 7]."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad N range {text!r}") from None
    if not values or min(values) < 0:
        raise argparse.ArgumentTypeError(f"bad N range {text!r}")
    return values


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _complex_list(text: str) -> list[complex]:
    try:
        return [complex(v.replace(" ", "")) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated complex numbers, got {text!r}") from None


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def resolve_threads(flag: int | None) -> int:
    if flag is not None:
        return max(1, flag)
    env = os.environ.get("MOM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidArgumentError(f"MOM_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _emit(rows: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        payload = rows[0] if len(rows) == 1 else rows
        out.write(json.dumps(payload, indent=2, default=str) + "\n")
    elif fmt == "csv":
        keys = list(dict.fromkeys(k for r in rows for k in r))
        w = csv.DictWriter(out, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in r.items()})
    else:
        for r in rows:
            out.write("  ".join(f"{k}={v}" for k, v in r.items()) + "\n")


def _limits(args) -> lattice.Limits:
    return lattice.Limits(max_states=args.max_states, max_bytes=args.max_bytes)


def cmd_count(args, out) -> int:
    if args.epsilon is not None and (args.group != "so" or args.side == "brute"):
        raise InvalidArgumentError("--epsilon applies to --group so on the array or pattern side")
    rows = []
    for n in args.n:
        if args.side == "brute":
            res = lattice.brute_force_count(args.group, n, args.k, args.beta, _limits(args))
        elif args.epsilon is not None:
            res = lattice.count_constrained_so_signed(n, args.k, args.beta, args.epsilon,
                                                     _limits(args), args.side)
        else:
            res = lattice.count_constrained(args.group, n, args.k, args.beta, _limits(args), args.side)
        rows.append(res.as_dict())
    _emit(rows, args.format, out)
    return EXIT_OK


def cmd_poly(args, out) -> int:
    res = polynomials.mom_polynomial(args.group, args.k, args.beta, _limits(args), args.threads)
    if args.format == "csv":
        _emit([{"degree": d, "coefficient": str(c)} for d, c in enumerate(res.polynomial.coefficients)],
              "csv", out)
    elif args.format == "text":
        out.write(f"{res.group}({res.k},{res.beta}): {res.polynomial}\n"
                  f"degree={res.polynomial.degree} leading={res.leading}\n")
    else:
        _emit([res.to_json()], "json", out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    if args.golden:
        table = polynomials.load_golden(Path(args.golden).read_text(encoding="utf-8"), verify_checksum=False)
    else:
        table = polynomials.load_golden()
    entries = DEFAULT_BUDGET + (LARGE_BUDGET if args.budget == "large" else [])
    attempted = set(entries)
    rows, failed = [], False
    for g, k, b in DEFAULT_BUDGET + LARGE_BUDGET:
        key = polynomials.golden_key(g, k, b)
        row = {"entry": key}
        want = table.get(key)
        if (g, k, b) not in attempted:
            row.update(status="SKIPPED", reason="budget")
        elif want is None:
            row.update(status="SKIPPED", reason="no reference")
        else:
            start = time.perf_counter()
            try:
                got = polynomials.mom_polynomial(g, k, b, _limits(args), args.threads).polynomial
            except ResourceLimitError as exc:
                row.update(status="SKIPPED", reason=f"budget: {exc}")
            else:
                diff = polynomials.coefficient_diff(got, want)
                row["status"] = "PASS" if not diff else "FAIL"
                if diff:
                    failed = True
                    row["diff"] = [{"degree": d, "computed": str(a), "reference": str(r)} for d, a, r in diff]
                row["seconds"] = round(time.perf_counter() - start, 3)
        rows.append(row)
    if args.format == "text":
        for r in rows:
            line = f"{r['status']:8s} {r['entry']}"
            if "reason" in r:
                line += f"  ({r['reason']})"
            out.write(line + "\n")
            for d in r.get("diff", []):
                out.write(f"         N^{d['degree']}: computed {d['computed']}, reference {d['reference']}\n")
    else:
        _emit(rows, args.format, out)
    return EXIT_INTEGRITY if failed else EXIT_OK


def cmd_volume(args, out) -> int:
    if args.symmetry is not None:
        rep = asymptotics.symmetry_point_leading_check(args.symmetry, _limits(args))
        row = {"s": rep.s, "volume": str(rep.volume), "leading": str(rep.leading),
               "closed_form": str(asymptotics.symmetry_point_closed_form(rep.s)),
               "status": "PASS" if rep.passed else "FAIL"}
        _emit([row], args.format, out)
        return EXIT_OK if rep.passed else EXIT_INTEGRITY
    if args.group is None or args.k is None or args.beta is None:
        raise InvalidArgumentError("volume needs --group, --k and --beta (or --symmetry)")
    if args.group == "so" and args.k == 1 and args.beta == 1:
        _emit([{"group": "so", "k": 1, "beta": 1, "dimension": 0, "status": "degenerate",
                "leading": "2"}], args.format, out)
        return EXIT_OK
    if args.epsilon is not None or args.group == "sp":
        spec = asymptotics.polytope_spec(args.group, args.k, args.beta, args.epsilon)
        est = asymptotics.mc_volume(spec, args.samples, args.seed, args.threads)
        _emit([est.to_json(spec)], args.format, out)
    else:
        tot = asymptotics.mc_volume_total(args.group, args.k, args.beta, args.samples, args.seed, args.threads)
        row = {"group": args.group, "k": args.k, "beta": args.beta,
               "dimension": tot.parts[0][1].dimension, "samples": args.samples, "seed": args.seed,
               "mean": tot.mean, "stderr": tot.standard_error, "epsilon_classes": len(tot.parts)}
        _emit([row], args.format, out)
    return EXIT_OK


def cmd_rmt(args, out) -> int:
    sink = open(args.csv, "w", encoding="utf-8", newline="") if args.csv else None
    try:
        est = rmt.mom_mc_estimate(args.group, args.n, args.k, args.beta, args.samples, args.seed,
                                  args.threads, csv_out=sink)
    finally:
        if sink:
            sink.close()
    _emit([est.to_json()], args.format, out)
    return EXIT_OK


def cmd_schur(args, out) -> int:
    if len(args.nu) != len(args.x):
        raise InvalidArgumentError("--nu and --x need the same length")
    row = {"group": args.group, "nu": args.nu, "x": [str(z) for z in args.x]}
    if args.group == "sp":
        comb = characters.sp_schur_combinatorial(args.nu, args.x)
        det_fn = characters.sp_schur_determinantal
    else:
        comb = characters.o_schur_combinatorial(args.nu, args.x)
        det_fn = characters.o_schur_determinantal
    row["combinatorial"] = _cplx(comb)
    try:
        row["determinantal"] = _cplx(det_fn(args.nu, args.x))
    except NearSingularError as exc:
        row["determinantal"] = None
        row["note"] = str(exc)
    if args.average is not None:
        row["N"] = args.average
        row["bump_gamburd"] = _cplx(characters.bump_gamburd_average(args.group, args.average, args.x))
        row["cfkrs"] = _cplx(characters.cfkrs_average(args.group, args.average, args.x))
    _emit([row], args.format, out)
    return EXIT_OK


def _cplx(z: complex):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mom", description="Moments of moments for Sp(2N) and SO(2N) by lattice counting.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default=None,
                        help="output format (default json; text for verify)")
    common.add_argument("--threads", type=_positive, default=None,
                        help="worker threads (default: $MOM_THREADS, then CPU count)")
    common.add_argument("--max-states", type=_positive, default=lattice.DEFAULT_MAX_STATES,
                        help="DP state cap (default 1e8)")
    common.add_argument("--max-bytes", type=_positive, default=lattice.DEFAULT_MAX_BYTES,
                        help="approximate memory budget for one DP table in bytes (default 2 GiB)")
    group = argparse.ArgumentParser(add_help=False)
    group.add_argument("--group", type=str.lower, choices=("sp", "so"), required=True)
    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--k", type=_positive, required=True)
    params.add_argument("--beta", type=_positive, required=True)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("count", parents=[common, group, params], help="exact constrained pattern counts")
    c.add_argument("--n", type=parse_range, required=True, help="N, a..b or a,b,c")
    c.add_argument("--side", choices=("array", "pattern", "brute"), default="array")
    c.add_argument("--epsilon", type=_int_list, default=None, help="SO sign vector, e.g. 1,-1,1,1")
    c.set_defaults(func=cmd_count)

    q = sub.add_parser("poly", parents=[common, group, params], help="certified exact polynomial in N")
    q.set_defaults(func=cmd_poly)

    v = sub.add_parser("verify", parents=[common], help="recompute reference polynomials")
    v.add_argument("--budget", choices=("default", "large"), default="default")
    v.add_argument("--golden", default=None, help="alternative reference table (JSON)")
    v.set_defaults(func=cmd_verify, default_format="text")

    vol = sub.add_parser("volume", parents=[common], help="polytope volume / symmetry point")
    vol.add_argument("--group", type=str.lower, choices=("sp", "so"))
    vol.add_argument("--k", type=_positive)
    vol.add_argument("--beta", type=_positive)
    vol.add_argument("--epsilon", type=_int_list, default=None)
    vol.add_argument("--samples", type=_positive, default=10**6)
    vol.add_argument("--seed", type=int, default=DEFAULT_SEED)
    vol.add_argument("--symmetry", type=_positive, default=None, metavar="S")
    vol.set_defaults(func=cmd_volume)

    r = sub.add_parser("rmt", parents=[common, group, params], help="Haar Monte Carlo estimate")
    r.add_argument("--n", type=_positive, required=True)
    r.add_argument("--samples", type=_positive, default=10**5)
    r.add_argument("--seed", type=int, default=DEFAULT_SEED)
    r.add_argument("--csv", default=None, help="write per-sample values to this CSV file")
    r.set_defaults(func=cmd_rmt)

    s = sub.add_parser("schur", parents=[common, group], help="evaluate Schur polynomials")
    s.add_argument("--nu", type=_int_list, required=True)
    s.add_argument("--x", type=_complex_list, required=True, help="points, e.g. 2,0.5+1j")
    s.add_argument("--average", type=int, default=None, metavar="N",
                   help="also evaluate both averaging formulas at this N")
    s.set_defaults(func=cmd_schur)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.threads = resolve_threads(args.threads)
        if args.format is None:
            args.format = getattr(args, "default_format", "json")
        return args.func(args, out)
    except ResourceLimitError as exc:
        print(f"mom: resource limit: {exc}", file=sys.stderr)
        return EXIT_CAP
    except IntegrityError as exc:
        print(f"mom: integrity failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (InvalidArgumentError, NearSingularError) as exc:
        print(f"mom: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run(argv) -> tuple[int, str]:
    """Run the CLI in-process and capture stdout (used by the tests)."""
    buf = io.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
