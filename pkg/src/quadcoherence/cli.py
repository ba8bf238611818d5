"""Command-line runner: ``coherence``, ``condition``, ``figure`` and ``verify``.

Exit codes: 0 success, 1 verification failure, 2 parse error,
3 integration failure, 4 negligible outcome.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

from . import analytic
from .coherence import l1_coherence
from .conditioning import (
    BeamSplitter,
    CoverageError,
    NegligibleOutcomeError,
    conditional_coherence,
    conditional_state,
)
from .figures import FIGURES, FigureCheckError, make_figure
from .numquad import IntegrationConfig, IntegrationError
from .states import StateSpecError, gaussian_params_of, parse_state
from .verification import CHECKS, run_checks

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_PARSE = 2
EXIT_INTEGRATION = 3
EXIT_NEGLIGIBLE = 4
MAX_NOTES = 8

DEFAULTS = {
    "state": "vacuum",
    "ancilla": "vacuum",
    "t": 1 / math.sqrt(2),
    "x0p": None,
    "half_width": 8.0,
    "rel_tol": 1e-8,
    "abs_tol": 1e-12,
    "depth": 14,
    "sweep_nodes": 129,
    "output": None,
    "workers": 1,
}
_TYPES = {
    "t": float,
    "x0p": float,
    "half_width": float,
    "rel_tol": float,
    "abs_tol": float,
    "depth": int,
    "sweep_nodes": int,
    "workers": int,
}


class UsageError(Exception):
    pass


def fmt(v: float) -> str:
    return f"{v:.9g}"


def read_config_file(path: str) -> dict[str, object]:
    out: dict[str, object] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _TYPES.get(key, str)(value)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return out


def resolve(args: argparse.Namespace) -> dict[str, object]:
    """Merge flags over the config file over built-in defaults."""
    settings = dict(DEFAULTS)
    if getattr(args, "config", None):
        settings.update(read_config_file(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    t = settings["t"]
    if not 0.0 <= t <= 1.0:
        raise UsageError(f"t must lie in [0, 1], got {t}")
    return settings


def integration_config(settings) -> IntegrationConfig:
    try:
        return IntegrationConfig(
            half_width=settings["half_width"],
            rel_tol=settings["rel_tol"],
            abs_tol=settings["abs_tol"],
            max_depth=settings["depth"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(record: dict[str, object]) -> None:
    for key, value in record.items():
        print(f"{key}={fmt(value) if isinstance(value, float) else value}")


def cmd_coherence(settings) -> int:
    cfg = integration_config(settings)
    spec = settings["state"]
    kernel = parse_state(spec)
    c = l1_coherence(kernel, cfg)
    record: dict[str, object] = {"state": spec, "C": c.value, "C_error": c.error_estimate}
    params = gaussian_params_of(spec)
    if params is not None:
        exact = analytic.gaussian_l1(params)
        record["C_analytic"] = exact
        record["rel_diff"] = abs(c.value - exact) / exact
    _emit(record)
    return EXIT_OK


def cmd_condition(settings) -> int:
    if settings["x0p"] is None:
        raise UsageError("condition needs --x0p")
    cfg = integration_config(settings)
    rho, rho0 = parse_state(settings["state"]), parse_state(settings["ancilla"])
    bs = BeamSplitter(settings["t"])
    x0p = settings["x0p"]
    res = conditional_state(rho, rho0, bs, x0p, cfg)
    cp = conditional_coherence(rho, rho0, bs, x0p, cfg).value
    c = l1_coherence(rho, cfg).value
    record: dict[str, object] = {
        "state": settings["state"],
        "ancilla": settings["ancilla"],
        "t": bs.t,
        "x0p": x0p,
        "p": res.density,
        "C": c,
        "Cp": cp,
        "ratio": cp / c,
    }
    params, params0 = gaussian_params_of(settings["state"]), gaussian_params_of(settings["ancilla"])
    if params is not None and params0 is not None:
        record["Cp_analytic"] = analytic.output_l1(analytic.gaussian_l1(params), analytic.gaussian_l1(params0), bs)
    _emit(record)
    return EXIT_OK


def write_figure_csv(fig, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        for comment in fig.comments:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fig.columns)
        for row in fig.rows:
            writer.writerow([str(v) if isinstance(v, int) else fmt(float(v)) for v in row])


def cmd_figure(settings, name: str) -> int:
    cfg = integration_config(settings)
    # Computed in full before anything is written.
    fig = make_figure(name, cfg, workers=settings["workers"], sweep_nodes=settings["sweep_nodes"])
    path = Path(settings["output"] or f"{name}.csv")
    write_figure_csv(fig, path)
    print(f"wrote {path} ({len(fig.rows)} rows)")
    return EXIT_OK


def cmd_verify(settings, only, perturb_r: bool) -> int:
    cfg = integration_config(settings)
    results = run_checks(only, cfg, perturb_r=perturb_r)
    for res in results:
        print(res.line())
        for note in res.details[:MAX_NOTES]:
            print(f"    {note}")
        if len(res.details) > MAX_NOTES:
            print(f"    ... {len(res.details) - MAX_NOTES} more")
    failed = [r.key for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} laws hold" + (f"; failed: {', '.join(failed)}" if failed else ""))
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value settings file (flags override it)")
    common.add_argument("--half-width", dest="half_width", type=float, help="integration half-width L")
    common.add_argument("--rel-tol", dest="rel_tol", type=float, help="relative tolerance")
    common.add_argument("--abs-tol", dest="abs_tol", type=float, help="absolute tolerance")
    common.add_argument("--depth", type=int, help="maximum bisection depth")
    common.add_argument("--sweep-nodes", dest="sweep_nodes", type=int, help="outcome-grid nodes")
    common.add_argument("--workers", type=int, help="threads for sweeps")

    parser = argparse.ArgumentParser(prog="quadcoherence", description="Quadrature coherence under beam-splitter conditioning.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coherence", parents=[common], help="l1 coherence of a state")
    p.add_argument("--state")

    p = sub.add_parser("condition", parents=[common], help="state and coherence after a conditioning outcome")
    p.add_argument("--state")
    p.add_argument("--ancilla")
    p.add_argument("--t", type=float)
    p.add_argument("--x0p", type=float)

    p = sub.add_parser("figure", parents=[common], help="write figure data as CSV")
    p.add_argument("name", choices=sorted(FIGURES))
    p.add_argument("--output", "-o")

    p = sub.add_parser("verify", parents=[common], help="check the coherence laws")
    p.add_argument("--only", action="append", choices=sorted(CHECKS), help="run only these checks")
    p.add_argument("--perturb-r", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = resolve(args)
        if args.command == "coherence":
            return cmd_coherence(settings)
        if args.command == "condition":
            return cmd_condition(settings)
        if args.command == "figure":
            return cmd_figure(settings, args.name)
        return cmd_verify(settings, args.only, args.perturb_r)
    except (UsageError, StateSpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NegligibleOutcomeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGLIGIBLE
    except (IntegrationError, CoverageError, FigureCheckError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION


if __name__ == "__main__":
    sys.exit(main())
