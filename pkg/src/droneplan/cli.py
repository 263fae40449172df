"""Command-line front end: scenario -> fleet sizing -> swarm search -> pruning -> export."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields

import numpy as np

from . import reporting
from .capacity import FootprintModel, evaluate_constraints, initial_fleet_size
from .channel import ChannelParams, RadioConfig, pathloss_from_geometry
from .errors import ConfigError, InfeasibleRateError, ScenarioError
from .pruning import prune
from .pso import PsoParams, run_pso
from .scenario import Region, generate_scenario_one, generate_scenario_two, load_scenario

OUT_DIR_ENV = "DRONEPLAN_OUT"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the planner reserves 2 for infeasible runs
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _dataclass_from(cls, raw, path):
    known = {f.name for f in fields(cls)}
    for key in raw:
        if key not in known:
            raise ConfigError(f"{path}.{key}: unknown field")
    try:
        return cls(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def load_config(path):
    """Parse the JSON config file into dataclass bundles (see README schema)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    known = {"channel", "radio", "pso", "footprint", "scenario"}
    for key in doc:
        if key not in known:
            raise ConfigError(f"{key}: unknown section")
    return {
        "channel": _dataclass_from(ChannelParams, doc.get("channel", {}), "channel"),
        "radio": _dataclass_from(RadioConfig, doc.get("radio", {}), "radio"),
        "pso": _dataclass_from(PsoParams, doc.get("pso", {}), "pso"),
        "footprint": doc.get("footprint", {}),
        "scenario": doc.get("scenario", {}),
    }


def _build_scenario(args, cfg_scenario, region_default):
    spec = dict(cfg_scenario)
    if args.scenario is not None:
        return load_scenario(args.scenario)
    if args.scenario_one:
        spec["kind"] = "one"
    if args.scenario_two:
        spec["kind"] = "two"
    if args.users is not None:
        spec["users"] = args.users
    if args.seed is not None:
        spec["seed"] = args.seed

    if spec.get("path"):
        return load_scenario(spec["path"])
    kind = spec.get("kind")
    if kind not in ("one", "two"):
        raise ConfigError("scenario.kind: choose 'one' or 'two', or pass --scenario FILE")
    try:
        region = Region(
            float(spec.get("width", region_default.width)),
            float(spec.get("height", region_default.height)),
        )
        n_users = int(spec.get("users", 1000))
        seed = int(spec.get("seed", 0))
        if kind == "one":
            split = tuple(spec.get("split", (0.2, 0.8)))
            return generate_scenario_one(n_users, region, split, seed)
        return generate_scenario_two(
            n_users,
            region,
            central_fraction=float(spec.get("central_fraction", 0.4)),
            sigma=float(spec.get("sigma", 1000.0)),
            seed=seed,
        )
    except ValueError as exc:
        raise ConfigError(f"scenario: {exc}") from exc


def cmd_plan(args):
    cfg = load_config(args.config) if args.config else {
        "channel": ChannelParams(),
        "radio": RadioConfig(),
        "pso": PsoParams(),
        "footprint": {},
        "scenario": {},
    }
    chan, radio = cfg["channel"], cfg["radio"]
    params = cfg["pso"]
    if args.max_iters is not None:
        params = PsoParams(**{**_asdict(params), "max_iters": args.max_iters})
    if args.swarm_size is not None:
        params = PsoParams(**{**_asdict(params), "swarm_size": args.swarm_size})

    scenario = _build_scenario(args, cfg["scenario"], Region(10_000.0, 10_000.0))
    n_bs = initial_fleet_size(scenario.n_users(), radio)

    fp_cfg = cfg["footprint"]
    for key in fp_cfg:
        if key not in ("snr_threshold_db", "sample_resolution"):
            raise ConfigError(f"footprint.{key}: unknown field")
    footprint = FootprintModel.for_region(
        scenario.region,
        chan,
        radio,
        snr_threshold_db=fp_cfg.get("snr_threshold_db"),
        sample_resolution=fp_cfg.get("sample_resolution", 25.0),
    )

    result = run_pso(
        scenario, chan, radio, footprint, params,
        n_bs=n_bs, seed=scenario.seed, threads=args.threads,
    )
    placement = result.placement
    removed = []
    if not args.no_prune:
        pruned = prune(placement, scenario, chan, radio, footprint)
        placement, removed = pruned.placement, pruned.removed

    report = evaluate_constraints(placement, scenario, chan, radio, footprint)
    cdf = reporting.sinr_cdf(placement, scenario, chan, radio)
    cells = reporting.voronoi_cells(placement, scenario.region)
    out_dir = args.out or os.environ.get(OUT_DIR_ENV) or "runs/latest"
    reporting.export_run(out_dir, scenario, placement, result.trace, report, cdf, cells)

    print(f"initial drones   : {n_bs}")
    print(f"final drones     : {placement.n_active()} (removed {len(removed)})")
    print(f"coverage         : {100.0 * report.covered_count / report.n_users:.1f}% "
          f"({report.covered_count}/{report.n_users})")
    print(f"harmonic SE      : {report.harmonic_se:.3f} bit/s/Hz")
    print(f"iterations       : {result.trace.rows[-1][0]}")
    print(f"feasible         : {result.feasible}")
    print(f"artifacts        : {out_dir}")
    if not result.feasible:
        print("warning: iteration budget exhausted before all constraints held", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def _asdict(params):
    return {f.name: getattr(params, f.name) for f in fields(params)}


def cmd_channel_curve(args):
    chan = load_config(args.config)["channel"] if args.config else ChannelParams()
    if args.h_min <= 0 or args.h_max <= args.h_min or args.h_step <= 0:
        raise ConfigError("channel-curve: require 0 < h-min < h-max and h-step > 0")
    radii = args.radius or [200.0, 500.0]
    hs = np.arange(args.h_min, args.h_max + 1e-9, args.h_step)
    columns = [pathloss_from_geometry(r, hs, chan) for r in radii]
    header = "h," + ",".join(f"pl_r{r:g}" for r in radii)
    lines = [header]
    for i, h in enumerate(hs):
        lines.append(f"{h:g}," + ",".join(repr(float(col[i])) for col in columns))
    text = "\n".join(lines) + "\n"
    if args.out:
        parent = os.path.dirname(args.out)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="droneplan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="size, place, prune, and export a fleet")
    plan.add_argument("--config", help="JSON config file")
    plan.add_argument("--scenario", help="scenario JSON file to load")
    plan.add_argument("--scenario-one", action="store_true",
                      help="generate the two-half uneven-uniform scenario")
    plan.add_argument("--scenario-two", action="store_true",
                      help="generate the central-cluster scenario")
    plan.add_argument("--users", type=int)
    plan.add_argument("--seed", type=int)
    plan.add_argument("--out", help=f"output directory (default ${OUT_DIR_ENV} or runs/latest)")
    plan.add_argument("--max-iters", type=int)
    plan.add_argument("--swarm-size", type=int)
    plan.add_argument("--threads", type=int, default=1)
    plan.add_argument("--no-prune", action="store_true")
    plan.set_defaults(func=cmd_plan)

    curve = sub.add_parser("channel-curve", help="pathloss vs altitude table")
    curve.add_argument("--config", help="JSON config file (channel section)")
    curve.add_argument("--radius", type=float, action="append",
                       help="horizontal distance in m (repeatable; default 200 and 500)")
    curve.add_argument("--h-min", type=float, default=1.0)
    curve.add_argument("--h-max", type=float, default=3000.0)
    curve.add_argument("--h-step", type=float, default=1.0)
    curve.add_argument("--out", help="output CSV path (default stdout)")
    curve.set_defaults(func=cmd_channel_curve)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        code = args.func(args)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except InfeasibleRateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_INFEASIBLE
    except (ConfigError, ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    if argv is None:
        sys.exit(code)
    return code
