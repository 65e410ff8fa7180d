"""
Command-line front end. Every command prints a JSON report on stdout (or
to --out) and exits 0 on success, 1 when a computed result contradicts a
proven statement, 2 on invalid input.
"""

import argparse
import sys
import time
from typing import Any, Callable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from orbitope_kit.config import config
from orbitope_kit.errors import ConsistencyError, OrbitopeKitError
from orbitope_kit.modules.caratheodory_lp import (
    bu_circle_search,
    bu_sphere_search,
    cubic_figure_map,
    miss_origin_bound,
    moment_curve_map,
    regular_simplex_vertices,
    sphere_inclusion_map,
    sphere_simplex_diameter,
    tabulate_odd_map,
    verify_miss_origin,
)
from orbitope_kit.modules.circle_geometry import TWO_PI, as_angles, chi_counts
from orbitope_kit.modules.guardrails import (
    ParameterValidator,
    RunConfig,
    load_boundary_point_file,
    load_measure_file,
    load_points_file,
)
from orbitope_kit.modules.metric_thickening import homotopy_probe, wasserstein1
from orbitope_kit.modules.moment_curve import nullspace_lambda, same_sign_condition, sign_law_holds
from orbitope_kit.modules.orbitope_b4 import iota, radial_project
from orbitope_kit.modules.raked_poly import from_roots, sample_series
from orbitope_kit.utils.analytics import RunAnalytics
from orbitope_kit.utils.logging_config import cli_logger
from orbitope_kit.utils.reporting import dumps_report, write_csv

# Excess above which a probe in the proven range contradicts diameter non-increase
PROBE_EXCESS_TOL = 1e-8


class CommandOutcome(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    payload: Any = None
    text: Optional[str] = None
    exit_code: int = 0


Handler = Callable[[argparse.Namespace], CommandOutcome]


def cmd_verify_miss_origin(args: argparse.Namespace) -> CommandOutcome:
    if args.points:
        angles = load_points_file(args.points)
    else:
        rng = np.random.default_rng(args.seed)
        width = args.max_diam if args.max_diam is not None else miss_origin_bound(args.k) - 0.01
        angles = as_angles(rng.uniform(0.0, TWO_PI) + rng.uniform(0.0, width, size=args.random))
    report = verify_miss_origin(args.k, angles)
    return CommandOutcome(payload=report, exit_code=0 if report.consistent else 1)


def cmd_poly_from_roots(args: argparse.Namespace) -> CommandOutcome:
    p = from_roots(args.roots)
    series = sample_series(p, args.samples)
    csv_text = write_csv(series, ["t", "p"])
    if args.samples_out:
        _write_text(args.samples_out, csv_text)
    if args.format == "csv":
        return CommandOutcome(text=csv_text)
    payload = {
        "k": p.k,
        "degree": p.degree,
        "roots": list(args.roots),
        "a": p.a,
        "b": p.b,
        "coefficients": p.coefficients,
        "samples_out": args.samples_out,
    }
    return CommandOutcome(payload=payload)


def _circle_map(name: str, pad: int) -> Callable[[np.ndarray], np.ndarray]:
    if name == "cubic":
        if not pad:
            return cubic_figure_map
        return lambda angles: np.hstack([cubic_figure_map(angles), np.zeros((len(angles), pad))])
    return moment_curve_map(int(name[2:]) // 2, pad)


def cmd_bu_search(args: argparse.Namespace) -> CommandOutcome:
    grid = args.grid or config.search.circle_grid
    table = tabulate_odd_map(_circle_map(args.map, args.pad), grid)
    return CommandOutcome(payload=bu_circle_search(table, args.bound, workers=args.workers))


def cmd_bu_sphere_search(args: argparse.Namespace) -> CommandOutcome:
    pad = args.pad or (1 if args.map == "padded-inclusion" else 0)
    bound = args.bound if args.bound is not None else sphere_simplex_diameter(args.n) - 0.01
    extra = regular_simplex_vertices(args.n) if args.with_simplex else None
    samples = args.samples if args.samples is not None else config.search.sphere_samples
    result = bu_sphere_search(
        sphere_inclusion_map(pad),
        bound,
        args.n,
        samples,
        args.seed,
        n_trials=args.trials,
        extra_points=extra,
    )
    return CommandOutcome(payload=result)


def cmd_project(args: argparse.Namespace) -> CommandOutcome:
    x = np.asarray(args.coordinates, dtype=float)
    point = radial_project(x, grid=args.grid)
    scale = float(np.linalg.norm(point.as_array()) / np.linalg.norm(x))
    return CommandOutcome(payload={"x": x, "scale": scale, "boundary_point": point})


def cmd_iota(args: argparse.Namespace) -> CommandOutcome:
    point = load_boundary_point_file(args.points)
    measure = iota(point)
    return CommandOutcome(payload={"boundary_point": point, "measure": measure.atoms})


def cmd_wasserstein(args: argparse.Namespace) -> CommandOutcome:
    mu = load_measure_file(args.first)
    nu = load_measure_file(args.second)
    distance, plan = wasserstein1(mu, nu)
    return CommandOutcome(payload={"distance": distance, "plan": plan})


def cmd_probe(args: argparse.Namespace) -> CommandOutcome:
    report = homotopy_probe(args.k, args.r, args.trials, args.seed, workers=args.workers, grid=args.grid)
    proven = args.k == 1 or (args.k == 2 and args.r <= TWO_PI / 3 + config.numerics.angle_eps)
    violated = proven and report.max_excess > PROBE_EXCESS_TOL
    if violated:
        cli_logger.error(f"union support grew by {report.max_excess:.3e} at k={args.k}")
    return CommandOutcome(payload=report, exit_code=1 if violated else 0)


def cmd_chi(args: argparse.Namespace) -> CommandOutcome:
    angles = load_points_file(args.points)
    counts = chi_counts(angles)
    return CommandOutcome(
        payload={"points": angles, "chi": counts, "uniform": len(set(counts)) == 1}
    )


def cmd_nullspace(args: argparse.Namespace) -> CommandOutcome:
    angles = load_points_file(args.points)
    vector = nullspace_lambda(angles, args.k)
    law = sign_law_holds(angles, args.k)
    payload = {
        "nullspace": vector,
        "weights": vector.weights,
        "sign_law_holds": law,
        "same_sign": same_sign_condition(angles, args.k),
    }
    return CommandOutcome(payload=payload, exit_code=0 if law else 1)


def cmd_ledger(args: argparse.Namespace) -> CommandOutcome:
    return CommandOutcome(payload=analytics.summary())


COMMANDS: dict[str, Handler] = {
    "verify-miss-origin": cmd_verify_miss_origin,
    "poly-from-roots": cmd_poly_from_roots,
    "bu-search": cmd_bu_search,
    "bu-sphere-search": cmd_bu_sphere_search,
    "project": cmd_project,
    "iota": cmd_iota,
    "wasserstein": cmd_wasserstein,
    "probe": cmd_probe,
    "chi": cmd_chi,
    "nullspace": cmd_nullspace,
    "ledger": cmd_ledger,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(
        prog="orbitope-kit",
        description="Numerical checks for metric thickenings of the circle and the orbitope B4.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-miss-origin", parents=[common], help="certify 0 against conv SM_2k(X)")
    p.add_argument("-k", type=int, required=True)
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--points", help="JSON file of angles")
    source.add_argument("--random", type=int, metavar="N", help="sample N points in an arc")
    p.add_argument("--max-diam", type=float, help="arc length for --random")

    p = sub.add_parser("poly-from-roots", parents=[common], help="raked polynomial with given roots")
    p.add_argument("roots", type=float, nargs="+")
    p.add_argument("--samples", type=int, help="number of (t, p(t)) samples")
    p.add_argument("--samples-out", help="CSV file for the sample series")

    p = sub.add_parser("bu-search", parents=[common], help="witness search on S^1")
    p.add_argument("--map", choices=["sm2", "sm4", "sm6", "sm8", "cubic"], default="sm4")
    p.add_argument("--bound", type=float, required=True)
    p.add_argument("--grid", type=int)
    p.add_argument("--pad", type=int, default=0)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("bu-sphere-search", parents=[common], help="randomized witness search on S^n")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--map", choices=["inclusion", "padded-inclusion"], default="inclusion")
    p.add_argument("--bound", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--pad", type=int, default=0)
    p.add_argument("--with-simplex", action="store_true")

    p = sub.add_parser("project", parents=[common], help="radial projection onto the boundary of B4")
    p.add_argument("coordinates", type=float, nargs="+")
    p.add_argument("--grid", type=int)

    p = sub.add_parser("iota", parents=[common], help="measure of a boundary point of B4")
    p.add_argument("--points", required=True, help="JSON boundary point")

    p = sub.add_parser("wasserstein", parents=[common], help="1-Wasserstein distance of two measures")
    p.add_argument("first")
    p.add_argument("second")

    p = sub.add_parser("probe", parents=[common], help="union-support diameter excess")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-r", type=float, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--grid", type=int)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("chi", parents=[common], help="chi counts of a configuration")
    p.add_argument("--points", required=True)

    p = sub.add_parser("nullspace", parents=[common], help="closed-form nullspace and sign law")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--points", required=True)

    sub.add_parser("ledger", parents=[common], help="summary of the run ledger")
    return parser


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        k=getattr(args, "k", None),
        n=getattr(args, "n", None),
        r=getattr(args, "r", None),
        bound=getattr(args, "bound", None),
        grid=getattr(args, "grid", None),
        seed=args.seed,
        trials=getattr(args, "trials", None),
        samples=getattr(args, "samples", None),
        random_points=getattr(args, "random", None),
        max_diam=getattr(args, "max_diam", None),
        workers=getattr(args, "workers", None),
        pad=getattr(args, "pad", 0),
        points_path=getattr(args, "points", None),
        out_path=args.out,
        output_format=args.format,
    )


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise OrbitopeKitError("invalid-input", f"cannot write {path}: {e.strerror}") from e


def _emit(outcome: CommandOutcome, out: Optional[str]) -> None:
    text = outcome.text if outcome.text is not None else dumps_report(outcome.payload) + "\n"
    if out:
        _write_text(out, text)
    else:
        sys.stdout.write(text)


validator = ParameterValidator(config, cli_logger)
analytics = RunAnalytics()


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse, validate, dispatch and report; returns the process exit code."""
    args = build_parser().parse_args(argv)
    run = run_config_from_args(args)
    start_time = time.time()
    exit_code = 2
    try:
        validator.validate_run_config(run)
        cli_logger.info(f"Running {args.command}")
        outcome = COMMANDS[args.command](args)
        _emit(outcome, args.out)
        exit_code = outcome.exit_code
    except OrbitopeKitError as e:
        cli_logger.warning(f"{args.command} rejected input: {e}")
        print(f"error: {e}", file=sys.stderr)
        exit_code = 2
    except ConsistencyError as e:
        cli_logger.error(f"{args.command} detected an inconsistency: {e}")
        print(f"inconsistency: {e}", file=sys.stderr)
        exit_code = 1
    finally:
        response_time = time.time() - start_time
        cli_logger.info(f"{args.command} finished with exit code {exit_code} in {response_time:.2f}s")
        analytics.log_run_event(
            args.command, run.model_dump(exclude_none=True), exit_code, response_time
        )
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
