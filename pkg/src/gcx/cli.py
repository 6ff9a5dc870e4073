"""Command-line entry point.

Subcommands:

* ``gcx check {local-model|surgery|quotient|locus|all}`` -- run the
  deterministic verification suites, write a JSON array of check
  reports, print one summary line per check, and exit 0 iff all pass.
* ``gcx normal-form --input spinor.json`` -- factor a pure spinor.
* ``gcx bracket --input fields.json`` -- evaluate a Courant bracket at
  a point from JSON expression fields.

Exit codes: 0 success, 1 check failure, 2 usage/config error,
3 runtime assertion failure (a partial report is still written).
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from gcx.chart import ChartPoint, FormField, GcField, courant_bracket
from gcx.models import LogModelParams, SurgeryGeometry
from gcx.multilinear import Multiform
from gcx.spinor import check_nondegenerate, normal_form
from gcx import verify

DEFAULT_QUOTIENTS = ((1, 0), (2, 1), (3, 2), (5, 2))
CHECK_TARGETS = ("local-model", "surgery", "quotient", "locus", "all")


@dataclass
class RunConfig:
    """Resolved configuration of one ``gcx check`` invocation."""

    target: str
    seed: int
    samples: int
    tol: float
    tol_second: float
    geometry: SurgeryGeometry
    quotients: list
    windows: list
    output: str
    jobs: int
    notes: list = field(default_factory=list)

    def validate(self) -> None:
        if self.samples < 1:
            raise ValueError("--samples must be >= 1")
        if self.tol <= 0 or self.tol_second <= 0:
            raise ValueError("tolerances must be positive")
        if self.jobs < 1:
            raise ValueError("--jobs must be >= 1")
        if self.target not in CHECK_TARGETS:
            raise ValueError(f"unknown check target {self.target!r}")
        lo_prev = None
        for lo, hi in self.windows:
            if not 1.0 <= lo < hi:
                raise ValueError(f"bump window ({lo}, {hi}) must satisfy 1 <= lo < hi")
            if lo_prev is not None and lo < lo_prev:
                raise ValueError("bump windows must be disjoint and ascending")
            lo_prev = hi


def _env_seed() -> int:
    raw = os.environ.get("GCX_SEED")
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"GCX_SEED must be an integer, got {raw!r}") from exc


def _parse_windows(raw: str, r_out: float) -> list:
    if not raw:
        return [(1.0, r_out)]
    out = []
    for part in raw.split(","):
        lo, _, hi = part.partition(":")
        out.append((float(lo), float(hi)))
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gcx",
        description="Deterministic verification of generalized complex local models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="run verification suites")
    check.add_argument("target", choices=CHECK_TARGETS)
    check.add_argument("--seed", type=int, default=None, help="PRNG seed (default GCX_SEED or 42)")
    check.add_argument("--samples", type=int, default=1000)
    check.add_argument("--tol", type=float, default=None, help="residual tolerance (default 1e-9)")
    check.add_argument("--r-min", type=float, default=0.05)
    check.add_argument("--r-out", type=float, default=2.0)
    check.add_argument("--profile", choices=("flat", "poly"), default="flat")
    check.add_argument("--m", type=int, default=None, help="quotient multiplicity")
    check.add_argument("--k", type=int, default=None, help="quotient twist, coprime with m")
    check.add_argument(
        "--windows",
        default="",
        help="disjoint bump descent windows, e.g. '1:2,2.5:3.5' (default '1:<r-out>')",
    )
    check.add_argument("--output", default="gcx-report.json", help="report file path")
    check.add_argument("--jobs", type=int, default=1, help="parallel sample evaluation")

    nf = sub.add_parser("normal-form", help="factor a pure spinor from JSON")
    nf.add_argument("--input", required=True)
    nf.add_argument("--tol", type=float, default=1e-9)
    nf.add_argument("--output", default=None)

    br = sub.add_parser("bracket", help="evaluate a Courant bracket at a point")
    br.add_argument("--input", required=True)
    br.add_argument("--output", default=None)

    return parser


def config_from_args(args) -> RunConfig:
    seed = args.seed if args.seed is not None else _env_seed()
    tol = args.tol if args.tol is not None else 1e-9
    tol_second = args.tol if args.tol is not None else 1e-8
    geometry = SurgeryGeometry(r_min=args.r_min, r_out=args.r_out, profile=args.profile)
    if (args.m is None) != (args.k is None):
        raise ValueError("--m and --k must be given together")
    if args.m is not None:
        quotients = [(args.m, args.k)]
    else:
        quotients = list(DEFAULT_QUOTIENTS)
    cfg = RunConfig(
        target=args.target,
        seed=seed,
        samples=args.samples,
        tol=tol,
        tol_second=tol_second,
        geometry=geometry,
        quotients=quotients,
        windows=_parse_windows(args.windows, args.r_out),
        output=args.output,
        jobs=args.jobs,
    )
    cfg.validate()
    for m, k in cfg.quotients:
        LogModelParams(m, k)  # validates coprimality
    return cfg


def run_checks(cfg: RunConfig, reports: list | None = None) -> list:
    """Execute the configured check suites in a fixed order.

    Completed reports are appended to ``reports`` as they finish, so a
    failure partway through still leaves the partial list behind.
    """
    reports = [] if reports is None else reports
    geo = cfg.geometry
    common = dict(seed=cfg.seed, jobs=cfg.jobs)

    if cfg.target in ("local-model", "all"):
        reports.append(
            verify.check_integrability(
                "cplane", samples=cfg.samples, tol=cfg.tol, geometry=geo, **common
            )
        )
        reports.append(
            verify.check_integrability(
                "polar", samples=cfg.samples, tol=cfg.tol, geometry=geo, **common
            )
        )
        reports.append(verify.check_type_jump(samples=min(cfg.samples, 200), tol=cfg.tol, **common))
        reports.append(
            verify.check_polar_compatibility(
                samples=min(cfg.samples, 400), tol=cfg.tol, r_min=geo.r_min, **common
            )
        )

    if cfg.target in ("surgery", "all"):
        reports.append(
            verify.check_symplectomorphism(geometry=geo, samples=cfg.samples, tol=cfg.tol, **common)
        )
        for i, window in enumerate(cfg.windows):
            suffix = f"_w{i + 1}" if len(cfg.windows) > 1 else ""
            rep = verify.check_h_properties(
                geometry=geo,
                samples=min(cfg.samples, 500),
                tol=cfg.tol_second,
                window=window,
                **common,
            )
            rep.check += suffix
            reports.append(rep)
            rep = verify.check_integrability(
                "bump",
                samples=min(cfg.samples, 500),
                tol=cfg.tol,
                geometry=geo,
                window=window,
                **common,
            )
            rep.check += suffix
            reports.append(rep)
        reports.append(
            verify.check_integrability(
                "outer",
                samples=min(cfg.samples, 500),
                tol=cfg.tol,
                geometry=geo,
                window=cfg.windows[-1],
                **common,
            )
        )
        reports.append(
            verify.check_integrability(
                "bump",
                samples=min(cfg.samples, 200),
                geometry=geo,
                window=cfg.windows[0],
                flip_h_sign=True,
                **common,
            )
        )

    if cfg.target in ("quotient", "all"):
        for m, k in cfg.quotients:
            reports.append(
                verify.check_quotient(
                    LogModelParams(m, k),
                    samples=min(cfg.samples, 500),
                    tol=cfg.tol_second,
                    r_min=geo.r_min,
                    **common,
                )
            )

    if cfg.target in ("locus", "all"):
        reports.append(verify.check_locus(seeds_count=min(cfg.samples, 100), tol=cfg.tol, **common))

    return reports


def _write_reports(path: str, reports: list) -> None:
    payload = json.dumps([r.to_json_dict() for r in reports], indent=2) + "\n"
    with open(path, "w") as handle:
        handle.write(payload)


def _cmd_check(args) -> int:
    try:
        cfg = config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    reports = []
    try:
        run_checks(cfg, reports)
    except Exception as exc:  # runtime assertion failure: partial report, exit 3
        _write_reports(cfg.output, reports)
        print(f"runtime failure: {exc}", file=sys.stderr)
        print(f"partial report written to {cfg.output}", file=sys.stderr)
        return 3

    _write_reports(cfg.output, reports)
    for rep in reports:
        print(rep.summary_line())
    print(f"report written to {cfg.output}")
    return 0 if all(r.passed for r in reports) else 1


def _cmd_normal_form(args) -> int:
    try:
        with open(args.input) as handle:
            data = json.load(handle)
        rho = Multiform.from_json_dict(data)
        nf = normal_form(rho, args.tol)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    nondeg = check_nondegenerate(nf, args.tol)
    print(f"type: {nf.type}")
    print(f"omega0: {nf.omega0}")
    print(f"B: {nf.B}")
    print(f"omega: {nf.omega}")
    print(f"gauge unique: {nf.gauge_unique}")
    print(f"nondegenerate: {nondeg}")
    if args.output:
        with open(args.output, "w") as handle:
            handle.write(json.dumps(nf.to_json_dict(), indent=2) + "\n")
    return 0


def _cmd_bracket(args) -> int:
    try:
        with open(args.input) as handle:
            data = json.load(handle)
        dim = int(data.get("dim", 4))
        chart = data.get("chart", "cli")
        periodic = tuple(bool(b) for b in data.get("periodic", [False] * dim))
        point = ChartPoint(chart, tuple(float(c) for c in data["point"]), periodic)
        u = GcField.from_expressions(chart, dim, data["u"]["vec"], data["u"]["cov"])
        v = GcField.from_expressions(chart, dim, data["v"]["vec"], data["v"]["cov"])
        h = None
        if data.get("H") is not None:
            h = FormField.from_expressions(chart, dim, data["H"]["terms"])
        out = courant_bracket(u, v, h, point)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    payload = {
        "vec": [{"re": float(c.real), "im": float(c.imag)} for c in out.vec],
        "cov": [{"re": float(c.real), "im": float(c.imag)} for c in out.cov],
    }
    print(json.dumps(payload, indent=2))
    if args.output:
        with open(args.output, "w") as handle:
            handle.write(json.dumps(payload, indent=2) + "\n")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "check":
        return _cmd_check(args)
    if args.command == "normal-form":
        return _cmd_normal_form(args)
    return _cmd_bracket(args)


if __name__ == "__main__":
    sys.exit(main())
