"""
Command-line entry point.

Exit codes: 0 success, 1 a verification check failed, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import astuple, dataclass, fields

import numpy as np

from . import entanglement as ent
from .cloning import CloningParams, NamedPair, coefficient_set, reduced_state
from .protocol import run_trials, success_probability
from .states import SchmidtSpectrum
from .verification import run_all

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    steps: int
    c: float = 1.0
    lambda1: float = 0.5

    def __post_init__(self):
        if self.parameter not in ("c", "lambda1"):
            raise UsageError(f"unknown sweep parameter {self.parameter!r}")
        if not self.start < self.stop:
            raise UsageError(f"sweep needs start < stop, got {self.start} >= {self.stop}")
        if self.steps < 2:
            raise UsageError(f"sweep needs at least 2 steps, got {self.steps}")
        if self.parameter == "c" and not (0.0 < self.start and self.stop <= 1.0):
            raise UsageError("swept c must lie in (0, 1]")
        if self.parameter == "lambda1" and not (0.0 <= self.start and self.stop <= 1.0):
            raise UsageError("swept lambda1 must lie in [0, 1]")

    def points(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class ReportRow:
    c: float
    d: float
    Q_coeff: float
    critical_concurrence: float
    witness_value: float
    concurrence_mixed: float
    ppt_flag: bool
    p_success: float


def report_row(c: float, lambda1: float) -> ReportRow:
    p = _params(c)
    s = SchmidtSpectrum.qubits(lambda1)
    rho = reduced_state(s, p, NamedPair.NONLOCAL_14)
    return ReportRow(
        c=p.c,
        d=p.d,
        Q_coeff=coefficient_set(p).Q,
        critical_concurrence=ent.critical_concurrence(p.c).critical_concurrence,
        witness_value=ent.witness_value(ent.W1, rho),
        concurrence_mixed=ent.concurrence_mixed(rho),
        ppt_flag=ent.ppt_entangled(rho),
        p_success=success_probability(p),
    )


def sweep_rows(spec: SweepSpec) -> list[ReportRow]:
    rows = []
    for x in spec.points():
        if spec.parameter == "c":
            rows.append(report_row(float(x), spec.lambda1))
        else:
            rows.append(report_row(spec.c, float(x)))
    return rows


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    v = float(value)
    if v == 0.0:
        v = 0.0  # no "-0"
    return format(v, ".12g")


def write_csv(header, rows, out: str | None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) if not isinstance(x, str) else x for x in row])
    text = buf.getvalue()
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc


def _params(c: float) -> CloningParams:
    if not (0.0 < c <= 1.0):
        raise UsageError(f"--c must lie in (0, 1], got {c}")
    return CloningParams.from_c(c)


def cmd_sweep(args) -> int:
    lambda1 = 0.5 if args.lambda1 is None else args.lambda1
    if not 0.0 <= lambda1 <= 1.0:
        raise UsageError(f"--lambda1 must lie in [0, 1], got {lambda1}")
    if args.param == "c":
        start = args.start if args.start is not None else 1.0 / np.sqrt(3.0)
        stop = args.stop if args.stop is not None else 1.0
    else:
        start = args.start if args.start is not None else 0.0
        stop = args.stop if args.stop is not None else 1.0
    spec = SweepSpec(args.param, start, stop, args.steps, 1.0 if args.c is None else args.c, lambda1)
    if spec.parameter == "lambda1":
        _params(spec.c)
    rows = sweep_rows(spec)
    write_csv([f.name for f in fields(ReportRow)], [astuple(r) for r in rows], args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.k is not None and args.k not in (2, 3):
        raise UsageError(f"--k must be 2 or 3 for the brute-force oracle, got {args.k}")
    results = run_all(
        tol=args.tol, k=args.k, hermitized=args.hermitized_povm, inject_fault=args.inject_fault
    )
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


def cmd_run(args) -> int:
    if args.c is None:
        raise UsageError("run needs --c")
    p = _params(args.c)
    if args.trials < 1:
        raise UsageError(f"--trials must be positive, got {args.trials}")
    stats = run_trials(
        p,
        args.trials,
        seed=args.seed,
        hermitized=args.hermitized_povm,
        workers=args.workers,
        keep_outcomes=args.out is not None,
    )
    analytic = success_probability(p)
    se = stats.standard_error(analytic)
    lines = [
        f"c                 {_fmt(p.c)}",
        f"d                 {_fmt(p.d)}",
        f"trials            {stats.n}",
        f"seed              {args.seed}",
        f"empirical_rate    {_fmt(stats.rate)}",
        f"analytic_rate     {_fmt(analytic)}",
        f"standard_error    {_fmt(se)}",
        f"conclusive_wrong  {stats.conclusive_wrong}",
        "verdicts          "
        + " ".join(f"{k}={stats.verdicts[k]}" for k in ("plus", "minus", "inconclusive")),
        "steps             " + " ".join(f"{k}={v}" for k, v in stats.per_step.items()),
    ]
    if args.out is not None:
        rows = (
            (str(i), str(o.encoded_bit), str(o.alice_bit), o.bob_verdict.value, str(int(o.success)))
            for i, o in enumerate(stats.records())
        )
        write_csv(["trial", "encoded_bit", "alice_bit", "bob_verdict", "success"], rows, args.out)
    print("\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cloneshare",
        description="Cloning-controlled quantum secret sharing: sweeps, self-checks and Monte Carlo runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--c", type=float, help="cloning amplitude c in (0, 1]; d follows from unitarity")
    common.add_argument("--lambda1", type=float, help="first Schmidt coefficient (default 0.5)")
    common.add_argument("--out", help="output CSV path ('-' for stdout)")
    common.add_argument(
        "--hermitized-povm",
        action="store_true",
        help="use the symmetrized discrimination operators instead of the literal ones",
    )

    sp = sub.add_parser("sweep", parents=[common], help="tabulate entanglement and success quantities")
    sp.add_argument("--param", choices=("c", "lambda1"), default="c")
    sp.add_argument("--start", type=float)
    sp.add_argument("--stop", type=float)
    sp.add_argument("--steps", type=int, default=9)
    sp.set_defaults(func=cmd_sweep)

    vp = sub.add_parser("verify", parents=[common], help="run every closed-form/oracle check")
    vp.add_argument("--tol", type=float, default=1e-10)
    vp.add_argument("--k", type=int, help="also run the brute-force oracle at this k (2 or 3)")
    vp.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    vp.set_defaults(func=cmd_verify)

    rp = sub.add_parser("run", parents=[common], help="Monte Carlo protocol trials")
    rp.add_argument("--trials", type=int, default=100_000)
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("--workers", type=int, default=1)
    rp.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
