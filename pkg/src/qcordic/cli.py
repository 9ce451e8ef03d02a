"""Command-line front end.

Exit codes: 0 success, 2 usage or domain error, 3 a checked property failed.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .ampenc import CapacityError, MAX_STATEVECTOR_N, amplitude_encode, amplitude_sweep, xcheck
from .cordic import (
    DomainError,
    arcsin_batch,
    arcsin_value,
    decode_angle,
    directions,
    init_state,
    run_arcsin,
)
from .fixedpoint import grid_raw, to_signed, ulp
from .revops import OpTrace

EXIT_OK, EXIT_USAGE, EXIT_ASSERT = 0, 2, 3
SWEEP_MIN_N, SWEEP_MAX_N = 4, 32
# rows per batch when streaming a sweep
CHUNK = 1 << 16

ARCSIN_COLUMNS = "t_real,t_hex,ref,computed,abs_err"
AMPLITUDE_COLUMNS = "h,a0,a1,p1,abs_p_err"
TRACE_COLUMNS = "n,additions,budget_14n,swaps,cnots,bits_total"


def _f(x: float) -> str:
    return format(float(x), ".17g")


def _n_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


@dataclass
class SweepReport:
    n: int
    domain: str
    rows: int
    max_error: float
    mean_error: float
    additions: int


def _single_n(ns: List[int]) -> int:
    if len(ns) != 1:
        raise DomainError("this command takes a single --n")
    return ns[0]


def cmd_arcsin(args, out) -> int:
    n = _single_n(args.n)
    theta, trace = arcsin_value(args.t, n, negate_mode=args.negate_mode, clamp=args.clamp_iters)
    ref = math.asin(args.t)
    out.write("n,t,computed,ref,abs_err,additions\n")
    out.write(f"{n},{_f(args.t)},{_f(theta.value)},{_f(ref)},{_f(abs(theta.value - ref))},{trace.additions}\n")
    return EXIT_OK


def cmd_amplitude(args, out) -> int:
    n = _single_n(args.n)
    q, trace = amplitude_encode(args.h, n)
    h = round(args.h * (1 << (n - 1))) * 2.0 ** -(n - 1)
    out.write(AMPLITUDE_COLUMNS + ",additions\n")
    out.write(f"{_f(h)},{_f(q.a0)},{_f(q.a1)},{_f(q.p1)},{_f(abs(q.p1 - h))},{trace.additions}\n")
    return EXIT_OK


def _arcsin_rows(n: int, negate_mode: str, clamp: bool):
    """Yield (lines, errors) chunks over every t in [-1, 1) in ascending order."""
    t_raw = grid_raw(n, -1.0, 1.0, include_hi=False)
    digits = (n + 3) // 4
    for start in range(0, t_raw.shape[0], CHUNK):
        raw = t_raw[start:start + CHUNK]
        t = to_signed(raw, n) * ulp(n)
        computed = decode_angle(arcsin_batch(raw, n, negate_mode=negate_mode, clamp=clamp), n)
        ref = np.arcsin(t)
        err = np.abs(computed - ref)
        lines = [f"{_f(a)},{int(r):0{digits}x},{_f(b)},{_f(c)},{_f(e)}\n"
                 for a, r, b, c, e in zip(t, raw, ref, computed, err)]
        yield lines, err


def write_sweep(n: int, domain: str, out_dir: str, negate_mode: str = "not", clamp: bool = True) -> SweepReport:
    """Write one sweep CSV for width n and return its summary."""
    if domain == "arcsin":
        columns = ARCSIN_COLUMNS
        trace = OpTrace()
        s = init_state(0.0, n)
        run_arcsin(s, trace, negate_mode=negate_mode, clamp=clamp)
        chunks = _arcsin_rows(n, negate_mode, clamp)
    else:
        columns = AMPLITUDE_COLUMNS
        _, trace = amplitude_encode(0.0, n)
        sw = amplitude_sweep(n)
        lines = [f"{_f(h)},{_f(a0)},{_f(a1)},{_f(p)},{_f(e)}\n"
                 for h, a0, a1, p, e in zip(sw.h, sw.a0, sw.a1, sw.p1, sw.abs_err)]
        chunks = iter([(lines, sw.abs_err)])

    body: List[str] = []
    rows, total, worst = 0, 0.0, 0.0
    for lines, err in chunks:
        body.extend(lines)
        rows += err.shape[0]
        total += float(err.sum())
        worst = max(worst, float(err.max()))
    report = SweepReport(n, domain, rows, worst, total / rows, trace.additions)
    path = os.path.join(out_dir, f"{domain}_n{n}.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# domain={domain} n={n} negate_mode={negate_mode} clamp_iters={'on' if clamp else 'off'} "
                 f"rows={rows} max_error={_f(worst)} mean_error={_f(report.mean_error)} "
                 f"additions={trace.additions}\n")
        fh.write(columns + "\n")
        fh.writelines(body)
    return report


def cmd_sweep(args, out, err) -> int:
    ns = sorted(set(args.n))
    bad = [n for n in ns if not SWEEP_MIN_N <= n <= SWEEP_MAX_N]
    if bad:
        raise DomainError(f"sweep widths must lie in {SWEEP_MIN_N}..{SWEEP_MAX_N}, got {bad}")
    os.makedirs(args.out, exist_ok=True)
    reports = [write_sweep(n, args.domain, args.out, args.negate_mode, args.clamp_iters) for n in ns]
    out.write("n,domain,rows,max_error,mean_error,additions\n")
    for r in reports:
        out.write(f"{r.n},{r.domain},{r.rows},{_f(r.max_error)},{_f(r.mean_error)},{r.additions}\n")
    status = EXIT_OK
    for a, b in zip(reports, reports[1:]):
        if not b.max_error < a.max_error:
            err.write(f"max error did not decrease: n={a.n} -> {_f(a.max_error)}, "
                      f"n={b.n} -> {_f(b.max_error)}\n")
            status = EXIT_ASSERT
    if args.domain == "amplitude":
        for r in reports:
            bound = 2.0 ** (-r.n + 6)
            if r.max_error > bound:
                err.write(f"n={r.n}: max |a1^2 - h| = {_f(r.max_error)} exceeds {_f(bound)}\n")
                status = EXIT_ASSERT
    return status


def trace_directions(n: int, clamp: bool = True) -> OpTrace:
    """Counters for one directions pass (operation counts do not depend on t)."""
    trace = OpTrace()
    directions(init_state(-1.0, n), trace, clamp=clamp)
    return trace


def cmd_trace(args, out, err) -> int:
    status = EXIT_OK
    out.write(TRACE_COLUMNS + "\n")
    for n in args.n:
        tr = trace_directions(n, args.clamp_iters)
        out.write(f"{n},{tr.additions},{14 * n},{tr.swaps},{tr.controlled_nots},{tr.bits_total}\n")
        if tr.additions >= 14 * n:
            err.write(f"n={n}: {tr.additions} additions is not below 14n = {14 * n}\n")
            status = EXIT_ASSERT
        if tr.bits_total != 5 * n - 1:
            err.write(f"n={n}: directions pass touched {tr.bits_total} bits, expected {5 * n - 1}\n")
            status = EXIT_ASSERT
    return status


def cmd_xcheck(args, out, err) -> int:
    n = _single_n(args.n)
    if n > MAX_STATEVECTOR_N:
        raise CapacityError(f"xcheck holds 2**{5 * n} amplitudes; n is limited to {MAX_STATEVECTOR_N}")
    fidelity, sv, _ = xcheck(n)
    out.write("n,qubits,fidelity,norm\n")
    out.write(f"{n},{sv.num_qubits},{_f(fidelity)},{_f(sv.norm())}\n")
    if fidelity < 1 - 1e-12:
        err.write(f"fidelity {fidelity} below 1 - 1e-12\n")
        return EXIT_ASSERT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=_n_list, required=True, help="width(s), comma separated")
    common.add_argument("--negate-mode", choices=("not", "neg"), default="not",
                        help="controlled complement or true negation around the angle update")
    common.add_argument("--clamp-iters", type=_on_off, default=True, metavar="{on,off}",
                        help="run the sufficient Mult iteration count (on) or the closed-form count (off)")

    parser = argparse.ArgumentParser(prog="qcordic", description="Reversible fixed-point CORDIC arcsine.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("arcsin", parents=[common], help="evaluate one arcsine")
    p.add_argument("--t", type=float, required=True)

    p = sub.add_parser("amplitude", parents=[common], help="encode one h into amplitudes")
    p.add_argument("--h", type=float, required=True)

    p = sub.add_parser("sweep", parents=[common], help="exhaustive error sweep, one CSV per width")
    p.add_argument("--domain", choices=("arcsin", "amplitude"), default="arcsin")
    p.add_argument("--out", default=".", help="output directory")

    sub.add_parser("trace", parents=[common], help="addition and footprint counts")
    sub.add_parser("xcheck", parents=[common], help="state vector vs hybrid fidelity (n <= 5)")
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command == "arcsin":
            return cmd_arcsin(args, out)
        if args.command == "amplitude":
            return cmd_amplitude(args, out)
        if args.command == "sweep":
            return cmd_sweep(args, out, err)
        if args.command == "trace":
            return cmd_trace(args, out, err)
        return cmd_xcheck(args, out, err)
    except ValueError as exc:  # domain, range and capacity errors
        err.write(f"qcordic {args.command}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
