"""Batch verification harness.

``wulffkit verify SUITE`` generates instances, evaluates the inequalities of
the suite on each of them and prints a JSON or CSV report.  Exit status is 0
when every report holds (and every expected equality is attained), 1 on any
violation or solver failure, 2 on a usage error.

``wulffkit generate KIND`` writes a measure file that ``--measure`` accepts.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .ballbarthe import TransportSpec, bb_report, transport_eval, transport_identity_check, transport_inverse
from .bodies import (
    ConvexBody,
    corollary_6_1_and_6_3_reports,
    corollary_reports,
    gen_random_body,
    regular_simplex_body,
)
from .errors import (
    HypothesisViolated,
    NotEven,
    NotIsotropic,
    NotNormalized,
    SchemaError,
    WulffkitError,
)
from .measures import (
    DEFAULT_TOL,
    gen_cube_measure,
    gen_random_isotropic_fcentered,
    gen_simplex_measure,
    l2_norm,
    lift,
    symmetrize,
)
from .reports import DEFAULT_EQ_TOL, InequalityReport
from .serialization import load_measure, reports_to_csv, reports_to_json, save_measure
from .wulff import build_wulff, thm_1_report, thm_2_report, thm_3_1_report, thm_3_2_report, thm_5_1_report

SUITES = ("wulff", "even-wulff", "ball-barthe", "transport", "corollaries", "extremals")
THEOREM_GAP_TOL = 1e-9
ROUND_TRIP_TOL = 1e-8
DEFAULT_SOLVER_TOL = 1e-5
MAX_SEED = 2**64 - 1

# hypothesis failures of a user-supplied measure are usage errors, not verdicts
_INPUT_ERRORS = (HypothesisViolated, NotEven, NotIsotropic, NotNormalized)


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    dim: int = 2
    trials: int = 100
    seed: int = 0
    eq_tol: float = DEFAULT_EQ_TOL
    hyp_tol: float = DEFAULT_TOL
    solver_tol: float = DEFAULT_SOLVER_TOL
    output_format: str = "json"
    output_path: str | None = None
    measure_path: str | None = None

    def validate(self) -> None:
        if self.command not in (*SUITES, "all"):
            raise UsageError(f"unknown suite {self.command!r}")
        if not 2 <= self.dim <= 5:
            raise UsageError(f"--dim must lie in 2..5, got {self.dim}")
        if self.trials < 1:
            raise UsageError("--trials must be at least 1")
        if not 0 <= self.seed <= MAX_SEED:
            raise UsageError("--seed must be a 64-bit unsigned integer")
        for name in ("eq_tol", "hyp_tol", "solver_tol"):
            if not getattr(self, name) > 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.output_format not in ("json", "csv"):
            raise UsageError(f"unknown format {self.output_format!r}")


@dataclass
class SuiteReport:
    config: RunConfig
    reports: list[InequalityReport]
    summary: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.summary["failures"] and not self.summary["equality_mismatches"]

    def to_json(self, timing: bool = True) -> str:
        # the output path is left out so the bytes do not depend on where they go
        config = {k: v for k, v in asdict(self.config).items() if k != "output_path"}
        extra = {"config": config, "summary": self.summary}
        if timing:
            extra["wall_time"] = self.wall_time
        return reports_to_json(self.reports, **extra)

    def to_csv(self) -> str:
        return reports_to_csv(self.reports)


def trial_seed(seed: int, suite: str, trial: int) -> int:
    """Independent stream per (seed, suite, trial); order of execution is irrelevant."""
    ss = np.random.SeedSequence([seed, zlib.crc32(suite.encode()), trial])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def _support_size(n: int) -> int:
    return n * (n + 5)


def _tag(reports, **meta) -> list[InequalityReport]:
    return [r.with_meta(**meta) for r in reports]


# ---------------------------------------------------------------------------
# suites: each maps (config, fixed measure or None, trial, seed) to reports


def _suite_wulff(cfg, fixed, trial, s):
    m, f = fixed if fixed else gen_random_isotropic_fcentered(cfg.dim, _support_size(cfg.dim), seed=s)
    return _tag(
        [thm_5_1_report(m, f, cfg.hyp_tol, cfg.eq_tol), thm_2_report(m, f, cfg.hyp_tol, cfg.eq_tol)],
        gap_tol=THEOREM_GAP_TOL,
    )


def _suite_even_wulff(cfg, fixed, trial, s):
    if fixed:
        m, f = fixed
    else:
        m, f = symmetrize(*gen_random_isotropic_fcentered(cfg.dim, _support_size(cfg.dim), seed=s))
    return _tag(
        [thm_3_1_report(m, f, cfg.hyp_tol, cfg.eq_tol), thm_3_2_report(m, f, cfg.hyp_tol, cfg.eq_tol)],
        gap_tol=THEOREM_GAP_TOL,
    )


def _suite_ball_barthe(cfg, fixed, trial, s):
    m, f = fixed if fixed else gen_random_isotropic_fcentered(cfg.dim, _support_size(cfg.dim), seed=s)
    rng = np.random.default_rng(s)
    sign = 1 if trial % 2 == 0 else -1
    lifted = lift(m, f * (1.0 / l2_norm(m, f)), sign=sign, tol=cfg.hyp_tol)
    t = rng.uniform(0.1, 10.0, lifted.size)
    return _tag([bb_report(lifted, t, cfg.hyp_tol)], gap_tol=THEOREM_GAP_TOL)


def _suite_transport(cfg, fixed, trial, s):
    rng = np.random.default_rng(s)
    a = float(rng.uniform(0.05, 1.0))
    t_fwd = float(rng.uniform(0.1, 5.0))
    t_inv = float(rng.uniform(-3.0, 3.0))
    fwd = TransportSpec(a, "forward")
    inv = TransportSpec(a, "inverse")
    round_trip = abs(transport_inverse(fwd, transport_eval(fwd, t_fwd)) - t_fwd)
    meta = {"a": a, "gap_tol": 0.0}
    return [
        InequalityReport.upper(
            "transport_forward_identity", transport_identity_check(fwd, t_fwd), cfg.solver_tol, cfg.eq_tol, t=t_fwd, **meta
        ),
        InequalityReport.upper(
            "transport_inverse_identity", transport_identity_check(inv, t_inv), cfg.solver_tol, cfg.eq_tol, t=t_inv, **meta
        ),
        InequalityReport.upper("transport_round_trip", round_trip, ROUND_TRIP_TOL, cfg.eq_tol, t=t_fwd, **meta),
    ]


def _suite_corollaries(cfg, fixed, trial, s):
    n = cfg.dim
    if fixed:
        m, f = fixed
        out = list(corollary_6_1_and_6_3_reports(m, cfg.hyp_tol, cfg.eq_tol))
        if f is not None:
            W = build_wulff(m, f, tol=cfg.hyp_tol)
            K = ConvexBody.from_vpolytope(W.vbody).centered()
            out += corollary_reports(K, cfg.eq_tol)
        return _tag(out, gap_tol=cfg.solver_tol)
    K = gen_random_body(n, seed=s)
    m, _ = gen_random_isotropic_fcentered(n, _support_size(n), f_range=(1.0, 1.0), seed=s)
    out = corollary_reports(K, cfg.eq_tol) + list(corollary_6_1_and_6_3_reports(m, cfg.hyp_tol, cfg.eq_tol))
    return _tag(out, gap_tol=cfg.solver_tol)


def _suite_extremals(cfg, fixed, trial, s):
    n = cfg.dim
    sm, sf = gen_simplex_measure(n)
    cm, cf = gen_cube_measure(n)
    out = _tag(
        [
            thm_1_report(sm, sf, cfg.hyp_tol, cfg.eq_tol),
            thm_5_1_report(sm, sf, cfg.hyp_tol, cfg.eq_tol),
            thm_2_report(sm, sf, cfg.hyp_tol, cfg.eq_tol),
        ],
        extremal="simplex",
        gap_tol=THEOREM_GAP_TOL,
    )
    out += _tag(
        [thm_3_1_report(cm, cf, cfg.hyp_tol, cfg.eq_tol), thm_3_2_report(cm, cf, cfg.hyp_tol, cfg.eq_tol)],
        extremal="cube",
        gap_tol=THEOREM_GAP_TOL,
    )
    out += _tag(corollary_reports(regular_simplex_body(n), cfg.eq_tol), extremal="simplex", gap_tol=cfg.solver_tol)
    out += _tag(corollary_6_1_and_6_3_reports(sm, cfg.hyp_tol, cfg.eq_tol), extremal="simplex", gap_tol=cfg.solver_tol)
    return _tag(out, expect_equality=True)


_SUITE_FNS = {
    "wulff": _suite_wulff,
    "even-wulff": _suite_even_wulff,
    "ball-barthe": _suite_ball_barthe,
    "transport": _suite_transport,
    "corollaries": _suite_corollaries,
    "extremals": _suite_extremals,
}


def _run_trial(cfg, suite, fixed, trial):
    s = trial_seed(cfg.seed, suite, trial)
    try:
        reports = _SUITE_FNS[suite](cfg, fixed, trial, s)
        return _tag(reports, suite=suite, trial=trial), None
    except _INPUT_ERRORS as exc:
        if fixed is not None:
            raise UsageError(f"{suite}: measure file does not meet the suite hypotheses: {exc}") from exc
        return [], {"suite": suite, "trial": trial, "reason": f"{type(exc).__name__}: {exc}"}
    except WulffkitError as exc:
        return [], {"suite": suite, "trial": trial, "reason": f"{type(exc).__name__}: {exc}"}


def _threads() -> int:
    raw = os.environ.get("WULFFKIT_THREADS", "1")
    try:
        k = int(raw)
    except ValueError:
        raise UsageError(f"WULFFKIT_THREADS must be an integer, got {raw!r}") from None
    if k < 1:
        raise UsageError("WULFFKIT_THREADS must be at least 1")
    return k


def _summarize(reports: list[InequalityReport], errors: list[dict]) -> dict:
    failures = list(errors)
    mismatches = []
    for r in reports:
        tol = r.meta.get("gap_tol", 0.0)
        if r.gap < -tol:
            failures.append(
                {"suite": r.meta.get("suite"), "trial": r.meta.get("trial"), "name": r.name, "gap": r.gap,
                 "reason": "inequality violated"}
            )
        if r.meta.get("expect_equality") and not r.equality:
            mismatches.append({"suite": r.meta.get("suite"), "name": r.name, "relative_gap": r.relative_gap})
    gaps = [r.gap for r in reports]
    return {
        "reports": len(reports),
        "min_gap": min(gaps) if gaps else None,
        "max_gap": max(gaps) if gaps else None,
        "equality_count": sum(r.equality for r in reports),
        "failures": failures,
        "equality_mismatches": mismatches,
    }


def run(cfg: RunConfig) -> tuple[SuiteReport, int]:
    """Execute a suite; returns the report and the process exit code."""
    cfg.validate()
    fixed = None
    if cfg.measure_path is not None:
        try:
            fixed = load_measure(cfg.measure_path)
        except (OSError, SchemaError) as exc:
            raise UsageError(f"--measure: {exc}") from exc
        if fixed[0].dim != cfg.dim:
            raise UsageError(f"--measure has dimension {fixed[0].dim} but --dim is {cfg.dim}")
        needs_f = cfg.command in ("wulff", "even-wulff", "ball-barthe", "all")
        if needs_f and fixed[1] is None:
            raise UsageError(f"suite {cfg.command!r} needs f values in the measure file")

    suites = SUITES if cfg.command == "all" else (cfg.command,)
    jobs = []
    for suite in suites:
        ntrials = 1 if suite == "extremals" or (fixed is not None and suite != "transport") else cfg.trials
        jobs += [(suite, t) for t in range(ntrials)]

    start = time.perf_counter()
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(lambda job: _run_trial(cfg, job[0], fixed, job[1]), jobs))
    wall = time.perf_counter() - start

    reports = [r for rs, _ in results for r in rs]
    errors = [e for _, e in results if e is not None]
    rep = SuiteReport(cfg, reports, _summarize(reports, errors), wall)
    return rep, (0 if rep.ok else 1)


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _positive_float(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"{text} is not positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wulffkit", description="Verify volume inequalities for Wulff shapes and convex bodies.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=(*SUITES, "all"))
    v.add_argument("--dim", type=int, default=2)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--eq-tol", type=_positive_float, default=DEFAULT_EQ_TOL)
    v.add_argument("--hyp-tol", type=_positive_float, default=DEFAULT_TOL)
    v.add_argument("--solver-tol", type=_positive_float, default=DEFAULT_SOLVER_TOL)
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--out", metavar="PATH")
    v.add_argument("--measure", metavar="PATH", help="run on a fixed measure file instead of random instances")

    g = sub.add_parser("generate", help="write a measure file")
    g.add_argument("kind", choices=("simplex", "cube", "random", "random-even"))
    g.add_argument("--dim", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--support", type=int, default=None, help="number of candidate directions (random kinds)")
    g.add_argument("--out", metavar="PATH", required=True)
    return parser


def _generate(args) -> int:
    if not 2 <= args.dim <= 5:
        raise UsageError(f"--dim must lie in 2..5, got {args.dim}")
    if args.kind == "simplex":
        m, f = gen_simplex_measure(args.dim)
    elif args.kind == "cube":
        m, f = gen_cube_measure(args.dim)
    else:
        size = args.support or _support_size(args.dim)
        try:
            m, f = gen_random_isotropic_fcentered(args.dim, size, seed=args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if args.kind == "random-even":
            m, f = symmetrize(m, f)
    save_measure(args.out, m, f)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "generate":
            return _generate(args)
        cfg = RunConfig(
            command=args.suite,
            dim=args.dim,
            trials=args.trials,
            seed=args.seed,
            eq_tol=args.eq_tol,
            hyp_tol=args.hyp_tol,
            solver_tol=args.solver_tol,
            output_format=args.format,
            output_path=args.out,
            measure_path=args.measure,
        )
        rep, code = run(cfg)
    except UsageError as exc:
        print(f"wulffkit: error: {exc}", file=sys.stderr)
        return 2
    text = rep.to_json() if cfg.output_format == "json" else rep.to_csv()
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    s = rep.summary
    print(
        f"{cfg.command}: {s['reports']} reports, min gap {s['min_gap']}, "
        f"{s['equality_count']} equalities, {len(s['failures'])} failures, "
        f"{len(s['equality_mismatches'])} equality mismatches, {rep.wall_time:.2f}s",
        file=sys.stderr,
    )
    return code


if __name__ == "__main__":
    sys.exit(main())
