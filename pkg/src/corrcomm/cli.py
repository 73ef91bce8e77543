"""Command-line harness: risk sweeps, bound tables, verifier suites.

Subcommands
-----------
simulate   Monte Carlo risk over a (k, rho) grid from a JSON config.
bounds     Closed-form benchmark table over (k, rho) grids.
verify     Randomized inequality suites; exit 1 on any violation.
maxnormal  Quadrature table for the maximum of N unit normals.

Output is CSV (9 significant digits, LF endings) or JSON
({meta: {seed, version, schema: 1}, rows: [...]}); identical inputs and
seeds produce identical bytes. Progress and warnings go to stderr only.
Exit codes: 0 success, 1 verification failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .contraction import (
    FiniteJoint,
    InteractiveSpec,
    SweepOutcome,
    replay_violation,
    search_max_ratio,
    sweep_chain,
    sweep_gap_hamming,
    sweep_shift,
    sweep_tensorization,
    sweep_tilted,
    verify_interactive_chain,
)
from .infotheory import risk_bounds
from .rng import check_seed
from .schemes import (
    SCHEME_NAMES,
    SchemeConfig,
    check_preconditions,
    estimate_risk,
    expected_max_normal,
    var_max_normal,
)

SIMULATE_COLUMNS = (
    "scheme",
    "k",
    "rho",
    "mse",
    "bias",
    "variance",
    "ci95",
    "global_upper",
    "local_upper",
    "local_lower",
    "naive_risk",
    "max_scheme_risk",
)
BOUNDS_COLUMNS = (
    "k",
    "rho",
    "global_upper",
    "local_upper",
    "local_lower",
    "naive_risk",
    "max_scheme_risk",
)
VERIFY_COLUMNS = ("suite", "checks", "violations", "worst_margin")
MAXNORMAL_COLUMNS = ("n", "mean", "variance", "asymptote", "ratio")

SUITES = ("sdpi", "tilted", "tensor", "chain", "shift", "gaphamming")


class ConfigError(Exception):
    """Invalid configuration or arguments; maps to exit code 2."""


# ----------------------------------------------------------------------
# emission
# ----------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".9g")


def _csv(columns, rows) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    return value


def _json_report(rows, seed) -> str:
    doc = {
        "meta": {"seed": seed, "version": __version__, "schema": 1},
        "rows": _jsonable(rows),
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="ascii", newline="") as fh:
            fh.write(text)


def _note(message: str) -> None:
    print(message, file=sys.stderr)


# ----------------------------------------------------------------------
# simulate
# ----------------------------------------------------------------------

def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def _as_grid(value, name: str, cast) -> list:
    if not isinstance(value, (list, tuple)) or len(value) == 0:
        raise ConfigError(f"empty grid: {name}")
    try:
        return [cast(v) for v in value]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value in {name}: {exc}") from exc


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    scheme = cfg.get("scheme")
    if scheme not in SCHEME_NAMES:
        raise ConfigError(f"scheme must be one of {SCHEME_NAMES}, got {scheme!r}")
    params = cfg.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params must be a JSON object")
    k_grid = _as_grid(cfg.get("k_grid"), "k_grid", int)
    rho_grid = _as_grid(cfg.get("rho_grid"), "rho_grid", float)
    trials = args.trials if args.trials is not None else cfg.get("trials")
    if not isinstance(trials, int) or trials < 100:
        raise ConfigError(f"trials must be an integer >= 100, got {trials!r}")
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    try:
        check_seed(seed)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    fmt = args.format or cfg.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    out = args.out if args.out is not None else cfg.get("out")
    use_batches = bool(cfg.get("use_batches", False))

    # Every cell must pass preconditions before the first trial runs.
    cells = []
    for k in sorted(set(k_grid)):
        for rho in sorted(set(rho_grid)):
            sc = SchemeConfig(scheme, k, params, use_batches=use_batches)
            try:
                check_preconditions(sc, rho)
            except ValueError as exc:
                raise ConfigError(f"cell (k={k}, rho={rho}): {exc}") from exc
            cells.append((sc, k, rho))

    rows = []
    for sc, k, rho in cells:
        report = estimate_risk(sc, rho, trials, seed)
        bounds = risk_bounds(k, rho)
        row = {
            "scheme": scheme,
            "k": k,
            "rho": rho,
            "mse": report.mse,
            "bias": report.bias,
            "variance": report.variance,
            "ci95": report.ci95_halfwidth,
        }
        row.update(bounds.as_dict())
        rows.append(row)
        _note(f"simulate: k={k} rho={_fmt(rho)} mse={report.mse:.6g}")

    if fmt == "csv":
        _emit(_csv(SIMULATE_COLUMNS, rows), out)
    else:
        _emit(_json_report(rows, seed), out)
    return 0


# ----------------------------------------------------------------------
# bounds
# ----------------------------------------------------------------------

def _split_grid(text: str, name: str, cast) -> list:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ConfigError(f"empty grid: {name}")
    try:
        return [cast(t) for t in items]
    except ValueError as exc:
        raise ConfigError(f"bad value in {name}: {exc}") from exc


def cmd_bounds(args) -> int:
    ks = _split_grid(args.k, "k", int)
    rhos = _split_grid(args.rho, "rho", float)
    rows = []
    for k in sorted(set(ks)):
        for rho in sorted(set(rhos)):
            try:
                b = risk_bounds(k, rho)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            row = {"k": k, "rho": rho}
            row.update(b.as_dict())
            rows.append(row)
    if (args.format or "csv") == "json":
        _emit(_json_report(rows, None), args.out)
    else:
        _emit(_csv(BOUNDS_COLUMNS, rows), args.out)
    return 0


# ----------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------

DEFAULT_DRAWS = {
    "sdpi": 2000,
    "tilted": 10000,
    "tensor": 500,
    "chain": 201,
    "shift": 100,
    "gaphamming": 100,
}


def _run_suite(name: str, draws: int | None, seed: int, rho: float | None) -> SweepOutcome:
    n = DEFAULT_DRAWS[name] if draws is None else draws
    if name == "sdpi":
        r = rho if rho is not None else 0.6
        result = search_max_ratio(
            FiniteJoint.binary_symmetric(r),
            r_max=3,
            u_max=3,
            restarts=n,
            seed=seed,
            ceiling=r * r + 1e-9,
        )
        return SweepOutcome(
            suite="sdpi",
            checks=result.evaluations,
            violations=result.violations,
            stats={
                "worst_margin": r * r + 1e-9 - result.max_ratio_seen,
                "best_ratio": result.best_ratio,
            },
        )
    if name == "tilted":
        return sweep_tilted(rho if rho is not None else 0.7, n, seed)
    if name == "tensor":
        return sweep_tensorization(0.4, 0.8, n, seed)
    if name == "chain":
        return sweep_chain((0.3, 0.6, 0.9), max(1, -(-n // 3)), seed)
    if name == "shift":
        return sweep_shift(0.25, 0.5, n, seed)
    if name == "gaphamming":
        return sweep_gap_hamming(8, 1.0, n, seed)
    raise ConfigError(f"unknown suite: {name!r}")


def _outcome_row(outcome: SweepOutcome) -> dict:
    return {
        "suite": outcome.suite,
        "checks": outcome.checks,
        "violations": len(outcome.violations),
        "worst_margin": outcome.stats.get("worst_margin", math.nan),
        "stats": outcome.stats,
        "records": outcome.violations,
    }


def _selftest_outcome() -> SweepOutcome:
    # Deliberately corrupted instance: claim correlation 0.1 for a source
    # whose true correlation is 0.5 and reveal X outright. The chain bound
    # must flag it; a harness that stays silent here is broken.
    spec = InteractiveSpec(
        source=FiniteJoint.binary_symmetric(0.5),
        channels=(np.eye(2),),
    )
    report = verify_interactive_chain(spec, rho=0.1)
    violations = [] if report.ok else [report.instance]
    return SweepOutcome(
        suite="selftest",
        checks=1,
        violations=violations,
        stats={"worst_margin": report.rho_sq_injected - report.interchanged},
    )


def _replay_rows(path: str) -> tuple[list, int]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read replay file: {exc}") from exc
    if isinstance(data, dict) and "rows" in data:
        records = [r for row in data["rows"] for r in row.get("records", [])]
    elif isinstance(data, dict) and "check" in data:
        records = [data]
    elif isinstance(data, list):
        records = data
    else:
        raise ConfigError("replay file carries no violation records")
    rows = []
    failures = 0
    for record in records:
        try:
            result = replay_violation(record)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad violation record: {exc}") from exc
        ok = bool(result["ok"]) if isinstance(result, dict) else bool(result)
        failures += 0 if ok else 1
        rows.append(
            {
                "suite": f"replay:{record.get('check', '?')}",
                "checks": 1,
                "violations": 0 if ok else 1,
                "worst_margin": result.get("margin", math.nan)
                if isinstance(result, dict)
                else math.nan,
                "stats": {},
                "records": [] if ok else [record],
            }
        )
    return rows, failures


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else 0
    try:
        check_seed(seed)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc

    if args.replay:
        rows, failures = _replay_rows(args.replay)
    elif args.selftest:
        outcome = _selftest_outcome()
        rows = [_outcome_row(outcome)]
        failures = len(outcome.violations)
    else:
        if args.draws is not None and args.draws < 0:
            raise ConfigError(f"draws must be nonnegative, got {args.draws}")
        if args.draws == 0:
            _note("warning: 0 draws requested; suites pass vacuously")
        names = SUITES if args.suite == "all" else (args.suite,)
        rows = []
        failures = 0
        for name in names:
            outcome = _run_suite(name, args.draws, seed, args.rho)
            rows.append(_outcome_row(outcome))
            failures += len(outcome.violations)
            _note(
                f"verify: suite={outcome.suite} checks={outcome.checks} "
                f"violations={len(outcome.violations)}"
            )

    if (args.format or "csv") == "json":
        _emit(_json_report(rows, seed), args.out)
    else:
        _emit(_csv(VERIFY_COLUMNS, rows), args.out)
    return 1 if failures else 0


# ----------------------------------------------------------------------
# maxnormal
# ----------------------------------------------------------------------

def cmd_maxnormal(args) -> int:
    ns = _split_grid(args.n, "n", int)
    rows = []
    for n in sorted(set(ns)):
        if n < 1:
            raise ConfigError(f"pool size must be >= 1, got {n}")
        mean = expected_max_normal(n)
        asym = math.sqrt(2.0 * math.log(n)) if n > 1 else 0.0
        rows.append(
            {
                "n": n,
                "mean": mean,
                "variance": var_max_normal(n),
                "asymptote": asym,
                "ratio": mean / asym if asym > 0 else math.nan,
            }
        )
    if (args.format or "csv") == "json":
        _emit(_json_report(rows, None), args.out)
    else:
        _emit(_csv(MAXNORMAL_COLUMNS, rows), args.out)
    return 0


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrcomm",
        description="Correlation estimation under a k-bit budget: "
        "simulations, bounds, and inequality verification.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        if seed:
            p.add_argument("--seed", type=int, default=None, help="master seed (u64)")
        p.add_argument(
            "--format", choices=("csv", "json"), default=None, help="output format"
        )
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p_sim = sub.add_parser("simulate", help="Monte Carlo risk over a (k, rho) grid")
    p_sim.add_argument("--config", required=True, help="JSON experiment config")
    p_sim.add_argument("--trials", type=int, default=None, help="override trials")
    common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_bounds = sub.add_parser("bounds", help="closed-form benchmark table")
    p_bounds.add_argument("--k", required=True, help="comma-separated bit budgets")
    p_bounds.add_argument("--rho", required=True, help="comma-separated correlations")
    common(p_bounds, seed=False)
    p_bounds.set_defaults(func=cmd_bounds)

    p_verify = sub.add_parser("verify", help="randomized inequality suites")
    p_verify.add_argument(
        "--suite", choices=SUITES + ("all",), default="all", help="which suite"
    )
    p_verify.add_argument("--draws", type=int, default=None, help="instances per suite")
    p_verify.add_argument(
        "--rho", type=float, default=None, help="source correlation (sdpi/tilted)"
    )
    p_verify.add_argument(
        "--selftest",
        action="store_true",
        help="run the injected-violation fixture (expects exit 1)",
    )
    p_verify.add_argument(
        "--replay", default=None, help="re-run violation records from a JSON report"
    )
    common(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_max = sub.add_parser("maxnormal", help="moments of the max of n unit normals")
    p_max.add_argument(
        "--n",
        default="16,256,4096,65536,1048576",
        help="comma-separated pool sizes",
    )
    common(p_max, seed=False)
    p_max.set_defaults(func=cmd_maxnormal)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2
    except ValueError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
