"""Command-line front end: optimize, sweep, xopt, crossover, validate.

Exit codes: 0 success, 1 usage or configuration error, 2 a sweep produced
no feasible point.  Infeasible single scenarios are reported in-band as
JSON, not as process failures.
"""
from __future__ import annotations

import argparse
import json
import sys

from .approx import (
    crossover_mcs,
    crossover_rate_reliable,
    smallest_mcs_at_least,
    x_opt_coefficient,
)
from .exact import NoFeasiblePlanError, optimize_exact, simulate_throughput, throughput_exact
from .geometry import AggregationPlan
from .params import (
    DEFAULT_OVERHEAD,
    ProtocolFlavor,
    Scenario,
    apply_overrides,
    default_config,
    load_override_file,
)
from .report import (
    SweepGrid,
    default_grid,
    rows_to_csv,
    rows_to_json,
    run_sweep,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; 2 is reserved for
    # infeasible-only sweeps, so remap usage errors to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load_config(flavor: ProtocolFlavor, config_path):
    config = default_config(flavor)
    overhead = DEFAULT_OVERHEAD
    if config_path:
        overrides = load_override_file(config_path)
        config, overhead = apply_overrides(config, overhead, overrides)
    return config, overhead


def _result_payload(scenario, res) -> dict:
    return {
        "flavor": scenario.flavor.value,
        "mcs": scenario.mcs,
        "ber": scenario.ber,
        "msdu_len": scenario.msdu_len,
        "feasible": True,
        "throughput_mbps": res.throughput,
        "goodput_bits_expected": res.goodput_bits_expected,
        "plan": {
            "x": res.plan.x,
            "y_base": res.plan.y_base,
            "n_extra": res.plan.n_extra,
        },
        "airtime": {
            "psdu_bits": res.airtime.psdu_bits,
            "symbols": res.airtime.symbols,
            "data_time_us": res.airtime.data_time,
            "ppdu_time_us": res.airtime.ppdu_time,
            "cycle_time_us": res.airtime.cycle_time,
        },
    }


def _cmd_optimize(args) -> int:
    flavor = ProtocolFlavor.parse(args.flavor)
    config, overhead = _load_config(flavor, args.config)
    scenario = Scenario(flavor=flavor, mcs=args.mcs, ber=args.ber, msdu_len=args.msdu_len)
    try:
        res = optimize_exact(scenario, config, overhead)
    except NoFeasiblePlanError as exc:
        print(json.dumps({"feasible": False, "error": str(exc)}, indent=2))
        return 0
    print(json.dumps(_result_payload(scenario, res), indent=2))
    return 0


def _parse_grid_file(path) -> SweepGrid:
    overrides = load_override_file(path)
    kwargs = {}
    for key, value in overrides.items():
        if key == "bers":
            kwargs["bers"] = tuple(float(v) for v in value.split(",") if v.strip())
        elif key == "msdu_lens":
            kwargs["msdu_lens"] = tuple(int(v) for v in value.split(",") if v.strip())
        elif key == "flavors":
            kwargs["flavors"] = tuple(
                ProtocolFlavor.parse(v) for v in value.split(",") if v.strip()
            )
        else:
            raise ValueError(f"unknown grid key: {key}")
    return SweepGrid(**kwargs)


def _cmd_sweep(args) -> int:
    grid = _parse_grid_file(args.grid_file) if args.grid_file else default_grid()
    overrides = load_override_file(args.config) if args.config else None
    rows = run_sweep(grid, overrides, workers=args.workers)
    text = rows_to_csv(rows) if args.format == "csv" else rows_to_json(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not any(row.feasible for row in rows):
        print("sweep produced no feasible point", file=sys.stderr)
        return 2
    return 0


def _cmd_xopt(args) -> int:
    config, overhead = _load_config(ProtocolFlavor.AX256, args.config)
    om_bytes = args.om_bytes if args.om_bytes is not None else overhead.mpdu_overhead_bytes
    coefficient = x_opt_coefficient(
        args.ber, 8 * om_bytes, config.ppdu_time_limit, config.preamble
    )
    print(
        json.dumps(
            {
                "ber": args.ber,
                "rate_mbps": args.rate,
                "om_bytes": om_bytes,
                "x_opt": coefficient * args.rate,
                "coefficient_per_mbps": coefficient,
            },
            indent=2,
        )
    )
    return 0


def _cmd_crossover(args) -> int:
    config, overhead = _load_config(ProtocolFlavor.AX256, args.config)
    if args.reliable:
        rates = crossover_rate_reliable(args.msdu_len, overhead, config)
        payload = {
            "msdu_len": args.msdu_len,
            "discrete_mbps": rates.discrete,
            "continuous_mbps": rates.continuous,
            "mcs_crossover": smallest_mcs_at_least(config, rates.continuous),
        }
    else:
        report = crossover_mcs(args.ber, overhead, config)
        payload = {
            "ber": report.ber,
            "x_opt_coefficient": report.x_opt_coefficient,
            "rate_threshold_mbps": report.rate_threshold,
            "mcs_crossover": report.mcs_crossover,
        }
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_validate(args) -> int:
    overrides = load_override_file(args.config) if args.config else None
    rows = run_sweep(default_grid(), overrides)
    max_rel = 0.0
    max_z = 0.0
    checked = 0
    for index, row in enumerate(rows):
        if not row.feasible:
            continue
        config = default_config(row.flavor)
        overhead = DEFAULT_OVERHEAD
        if overrides:
            config, overhead = apply_overrides(config, overhead, overrides)
        scenario = Scenario(row.flavor, row.mcs, row.ber, row.msdu_len)
        plan = AggregationPlan(row.x, row.y_base, row.n_extra)
        exact = throughput_exact(plan, scenario, config, overhead)
        sim = simulate_throughput(
            plan, scenario, config, overhead, cycles=args.cycles, seed=args.seed + index
        )
        dev = abs(sim.throughput - exact.throughput)
        max_rel = max(max_rel, dev / exact.throughput)
        if sim.std_error > 0:
            max_z = max(max_z, dev / sim.std_error)
        checked += 1
    print(
        json.dumps(
            {
                "cycles": args.cycles,
                "seed": args.seed,
                "points": checked,
                "max_relative_deviation": max_rel,
                "max_z_score": max_z,
            },
            indent=2,
        )
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aggthru", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_opt = sub.add_parser("optimize", help="best aggregation plan for one scenario")
    p_opt.add_argument("--flavor", required=True, choices=[f.value for f in ProtocolFlavor])
    p_opt.add_argument("--mcs", required=True, type=int)
    p_opt.add_argument("--ber", required=True, type=float)
    p_opt.add_argument("--msdu-len", required=True, type=int)
    p_opt.add_argument("--config", help="key=value overrides file")
    p_opt.set_defaults(func=_cmd_optimize)

    p_sweep = sub.add_parser("sweep", help="optimize a whole grid and emit a table")
    p_sweep.add_argument("--grid-file", help="key=value file: bers, msdu_lens, flavors")
    p_sweep.add_argument("--out", help="output path (default: stdout)")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.add_argument("--config", help="key=value overrides file")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_xopt = sub.add_parser("xopt", help="closed-form optimal MPDU count")
    p_xopt.add_argument("--ber", required=True, type=float)
    p_xopt.add_argument("--rate", required=True, type=float, help="PHY rate [Mbps]")
    p_xopt.add_argument("--om-bytes", type=int, default=None, help="per-MPDU overhead [bytes]")
    p_xopt.add_argument("--config", help="key=value overrides file")
    p_xopt.set_defaults(func=_cmd_xopt)

    p_cross = sub.add_parser("crossover", help="where a 256-frame window beats 64")
    p_cross.add_argument("--ber", type=float, help="positive bit error rate")
    p_cross.add_argument("--reliable", action="store_true", help="error-free channel analysis")
    p_cross.add_argument("--msdu-len", type=int, default=1500)
    p_cross.add_argument("--config", help="key=value overrides file")
    p_cross.set_defaults(func=_cmd_crossover)

    p_val = sub.add_parser("validate", help="Monte Carlo check of the analytic model")
    p_val.add_argument("--cycles", type=int, default=100_000)
    p_val.add_argument("--seed", type=int, default=0)
    p_val.add_argument("--config", help="key=value overrides file")
    p_val.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "crossover" and args.reliable == (args.ber is not None):
        parser.error("give exactly one of --ber or --reliable")
    if args.command == "xopt" and not 0.0 < args.ber < 1.0:
        parser.error("--ber must lie in (0, 1); use 'crossover --reliable' for BER=0")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"aggthru: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
