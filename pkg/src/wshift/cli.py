"""Command-line entry point.

Exit codes: 0 ok, 1 verification failure, 2 spec error, 3 not-subnormal
verdict, 4 budget or overflow, 5 oracle disagreement, 6 counterexample
assertion failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from typing import Optional, Sequence

from .errors import BudgetError, ShiftError, SpecError
from .moments import CONSISTENT, NOT_SUBNORMAL, berger_hausdorff_test
from .oracle import (
    MAX_DIM,
    ap_membership_probe,
    grid_probe,
    hyponormal_not_subnormal_witness,
    reference_threshold,
)
from .radii import MIN_WINDOW, estimate_radii
from .regions import CSV_COLUMNS, RadialRegion, boundary_samples
from .report import (
    DEFAULT_ORDER,
    Report,
    analyze,
    classes_section,
    dumps_document,
    open_unit_disc,
    write_atomic,
)
from .spectra import spectral_picture
from .weights import DEFAULT_WINDOW, TailRule, WeightSpec, load_spec

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_SPEC = 2
EXIT_NOT_SUBNORMAL = 3
EXIT_BUDGET = 4
EXIT_ORACLE = 5
EXIT_COUNTEREXAMPLE = 6

AGREEMENT_MIN = 0.95


def _err(msg: str) -> None:
    print(f"wshift: {msg}", file=sys.stderr)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _load(path: str) -> WeightSpec:
    try:
        return load_spec(path)
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write_boundary_csv(path: str, report: Report, samples: int) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["region", *CSV_COLUMNS])
    regions: list[tuple[str, RadialRegion]] = []
    if report.picture is not None:
        regions += [(name, getattr(report.picture, name)) for name in report.picture._REGIONS]
    if report.bpe is not None:
        regions += [("B", report.bpe.B), ("Ba", report.bpe.Ba), ("gamma_minus_ap", report.bpe.gamma_minus_ap)]
    for name, region in regions:
        for s in boundary_samples(region, samples):
            writer.writerow([name, s.circle_role, repr(s.radius), repr(s.theta), repr(s.re), repr(s.im)])
    write_atomic(path, buf.getvalue())


# --- commands -------------------------------------------------------------------


def cmd_analyze(args: argparse.Namespace) -> int:
    spec = _load(args.spec)
    report = analyze(spec, args.n_max, args.hankel_order)
    _emit(report.dumps(), args.out)
    if args.boundary_samples:
        _write_boundary_csv(args.boundary_samples, report, args.samples)
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    spec = _load(args.spec)
    classes = classes_section(spec, args.hankel_order, args.tol, args.shifts)
    cert = classes["subnormal_certificate"]
    doc = {**classes, "subnormal_certificate": cert.to_dict()}
    _emit(dumps_document({"schema_version": "1", "classes": doc}), args.out)
    return EXIT_NOT_SUBNORMAL if cert.verdict == NOT_SUBNORMAL else EXIT_OK


def _parse_lambda(text: str) -> complex:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise SpecError(f"--lambda expects RE,IM, got {text!r}") from None
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2:
        raise SpecError(f"--lambda expects RE,IM, got {text!r}")
    return complex(parts[0], parts[1])


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        r, t = (int(p) for p in text.lower().replace("×", "x").split("x"))
    except ValueError:
        raise SpecError(f"--grid expects RxT, got {text!r}") from None
    if r < 1 or t < 1:
        raise SpecError("--grid needs positive counts")
    return r, t


def cmd_oracle(args: argparse.Namespace) -> int:
    if args.dim > MAX_DIM:
        raise BudgetError(f"dimension {args.dim} exceeds the budget of {MAX_DIM}")
    if args.lam is None and args.grid is None:
        raise SpecError("oracle needs --lambda or --grid")
    spec = _load(args.spec)
    radii = estimate_radii(spec, args.n_max)
    picture = spectral_picture(radii)
    report = Report(weight_spec=spec.to_dict(), radii=radii, picture=picture)
    tau = args.threshold if args.threshold is not None else reference_threshold(spec, picture, args.dim)
    status = EXIT_OK
    if args.lam is not None:
        report.probes.append(ap_membership_probe(spec, _parse_lambda(args.lam), args.dim, picture, tau))
    if args.grid is not None:
        rings, angles = _parse_grid(args.grid)
        grid = grid_probe(spec, picture, rings, angles, args.dim, tau)
        report.probes.extend(grid.probes)
        report.grid = grid.to_dict()
        if grid.agreement < AGREEMENT_MIN:
            _err(f"oracle agreement {grid.agreement:.3f} below {AGREEMENT_MIN}")
            status = EXIT_ORACLE
    _emit(report.dumps(), args.out)
    return status


def williams_spec() -> WeightSpec:
    return WeightSpec(kind="unilateral", tail_pos=TailRule.builtin("williams_gap"), name="williams_gap")


def counterexample_checks(spec: WeightSpec, report: Report, m: int) -> list[dict]:
    """The quantities behind ``r1(S) < r2(S)`` for the factorial-run shift."""
    checks = []

    def check(name: str, value, ok: bool) -> None:
        checks.append({"quantity": name, "value": value, "pass": bool(ok)})

    radii = report.radii
    check("r1", radii.r1, radii.r1 <= 1e-6)
    check("r2", radii.r2, abs(radii.r2 - 1.0) <= 1e-9)
    # beta_{n!} / beta_{n! - n} over windows of length n: log ratio per step
    drops = []
    for n in range(3, m + 1):
        f = math.factorial(n)
        drops.append((spec.log_beta(f) - spec.log_beta(f - n)) / n)
    decreasing = all(b < a for a, b in zip(drops, drops[1:]))
    check("r1_window_log_ratios", drops, all(d < 0 for d in drops) and decreasing)
    f = math.factorial(m)
    roots = [spec.log_beta(n) / n for n in range(f // 2 + 1, f + 1)]
    r2_numeric = math.exp(min(roots))
    check("r2_numeric", r2_numeric, abs(r2_numeric - 1.0) <= 1e-9)
    bpe = report.bpe
    check("Ba", bpe.Ba.to_dict(), bpe.Ba.same_set(open_unit_disc()))
    check("gamma_minus_ap", bpe.gamma_minus_ap.to_dict(), bpe.gamma_minus_ap.is_empty)
    check("williams_gap", bpe.williams_gap, bpe.williams_gap)
    return checks


def cmd_counterexample(args: argparse.Namespace) -> int:
    m = args.factorial_max
    if not 3 <= m <= 8:
        raise SpecError(f"--factorial-max must lie in [3, 8], got {m}")
    spec = williams_spec()
    report = analyze(spec, max(math.factorial(m), MIN_WINDOW))
    report.checks = counterexample_checks(spec, report, m)
    _emit(report.dumps(), args.out)
    failed = [c["quantity"] for c in report.checks if not c["pass"]]
    if failed:
        _err("counterexample check failed: " + ", ".join(failed))
        return EXIT_COUNTEREXAMPLE
    return EXIT_OK


def verify_items() -> list[tuple[str, bool, str]]:
    items = []
    w = hyponormal_not_subnormal_witness()
    items.append((
        "hyponormal witness T = S* + 2S, x = e0 - 2e2",
        w["pass"],
        f"||T*^2 x||^2 = {w['norm_adjoint_sq']}, ||T^2 x||^2 = {w['norm_sq']}",
    ))

    uni = WeightSpec(kind="bilateral", tail_pos=TailRule.constant(1), tail_neg=TailRule.constant(1))
    pic = spectral_picture(estimate_radii(uni))
    circle = RadialRegion.circle(1.0)
    ok = (
        pic.spectrum.same_set(circle)
        and pic.approx_point.same_set(circle)
        and pic.point.is_empty
        and pic.point_adjoint.is_empty
    )
    items.append(("unitary bilateral shift picture", ok,
                  f"spectrum {pic.spectrum.describe()}, approx {pic.approx_point.describe()}, "
                  f"point {pic.point.describe()}, point_adjoint {pic.point_adjoint.describe()}"))

    bergman = WeightSpec(kind="unilateral", tail_pos=TailRule.builtin("bergman"))
    cert = berger_hausdorff_test(bergman, 8)
    moment_err = max(abs(mk - 1.0 / (k + 1)) for k, mk in enumerate(cert.moments))
    eig = min(cert.min_eig_H, cert.min_eig_H1, cert.min_eig_HB)
    ok = cert.verdict == CONSISTENT and eig >= -1e-10 and moment_err <= 1e-12
    items.append(("bergman shift Berger certificate at order 8", ok,
                  f"verdict {cert.verdict}, min eigenvalue {eig:.3e}, moment error vs 1/(k+1) {moment_err:.3e}"))
    return items


def cmd_verify_paper(args: argparse.Namespace) -> int:
    items = verify_items()
    for name, ok, detail in items:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in items) else EXIT_VERIFY


def cmd_theorem_index(args: argparse.Namespace) -> int:
    from .theorems import generate_theorem_index

    _emit(generate_theorem_index(), args.out)
    return EXIT_OK


# --- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wshift", description="Spectral analysis of weighted shift operators.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="radii, spectral picture, classes and point evaluations")
    a.add_argument("spec")
    a.add_argument("--n-max", type=int, default=DEFAULT_WINDOW, help="index window for radius estimates")
    a.add_argument("--hankel-order", type=int, default=DEFAULT_ORDER)
    a.add_argument("--out")
    a.add_argument("--boundary-samples", metavar="CSV", help="write boundary circle samples of every region")
    a.add_argument("--samples", type=int, default=64, help="samples per circle")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("classify", help="normal / hyponormal flags and a subnormality certificate")
    c.add_argument("spec")
    c.add_argument("--hankel-order", type=int, default=DEFAULT_ORDER)
    c.add_argument("--tol", type=float, default=1e-9)
    c.add_argument("--shifts", type=int, default=2, help="window shifts for bilateral specs")
    c.add_argument("--out")
    c.set_defaults(func=cmd_classify)

    o = sub.add_parser("oracle", help="truncation probes of T - lambda")
    o.add_argument("spec")
    o.add_argument("--lambda", dest="lam", metavar="RE,IM")
    o.add_argument("--dim", type=int, default=400)
    o.add_argument("--grid", metavar="RxT")
    o.add_argument("--threshold", type=float)
    o.add_argument("--n-max", type=int, default=DEFAULT_WINDOW)
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)

    x = sub.add_parser("counterexample", help="the factorial-run shift with r1 < r2")
    x.add_argument("--factorial-max", type=int, default=6)
    x.add_argument("--out")
    x.set_defaults(func=cmd_counterexample)

    v = sub.add_parser("verify-paper", help="reproduce the reference values")
    v.set_defaults(func=cmd_verify_paper)

    t = sub.add_parser("theorem-index", help="print the operation-to-result index")
    t.add_argument("--out")
    t.set_defaults(func=cmd_theorem_index)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        _err(str(exc))
        return EXIT_BUDGET
    except SpecError as exc:
        _err(str(exc))
        return EXIT_SPEC
    except ShiftError as exc:
        _err(str(exc))
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
