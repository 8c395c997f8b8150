"""Command-line front end for the experiments and the closed forms."""

from __future__ import annotations

import argparse
import sys

from .channel import ChannelModel
from .harness import (
    ExperimentReport,
    e1_config,
    e2_config,
    e3_config,
    ExperimentConfig,
    emit_csv,
    report_to_csv,
    run_custom,
    run_experiment_e1,
    run_experiment_e2,
    run_experiment_e3,
)
from .protocols import (
    adra_average_aoi,
    adra_optimize_cap,
    aira_average_aoi,
    aira_optimal_cap,
)


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _parse_config_file(path: str) -> dict[str, str]:
    """Plain key = value lines; '#' starts a comment."""
    values: dict[str, str] = {}
    with open(path) as fp:
        for lineno, raw in enumerate(fp, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


_CONVERTERS = {
    "n": _int_list,
    "delta": _int_list,
    "gaps": _float_list,
    "horizon": int,
    "seed": int,
    "replications": int,
    "misdetect": float,
    "beta_db": float,
    "noise_db": float,
    "radios": int,
    "p": float,
    "power_db": float,
    "channel": str,
    "protocol": str,
    "out": str,
    "paper_faithful": lambda s: s.lower() in ("1", "true", "yes"),
}


def _apply_config_file(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    for key, raw in _parse_config_file(args.config).items():
        if key not in _CONVERTERS:
            raise ValueError(f"unknown config key {key!r}")
        if getattr(args, key, None) is None:
            setattr(args, key, _CONVERTERS[key](raw))


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="key=value config file (flags override)")
    sub.add_argument("--n", type=_int_list, help="device counts, comma separated")
    sub.add_argument("--horizon", type=int, help="slots per run")
    sub.add_argument("--seed", type=int, help="master seed")
    sub.add_argument("--replications", type=int, help="runs per sweep point")
    sub.add_argument("--misdetect", type=float, help="misdetection probability")
    sub.add_argument("--out", help="CSV output path ('-' for stdout)")


def _experiment_config(args: argparse.Namespace, factory, default_out: str):
    overrides = {}
    if args.n is not None:
        overrides["n_list"] = args.n
    if args.horizon is not None:
        overrides["horizon"] = args.horizon
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.replications is not None:
        overrides["replications"] = args.replications
    if args.misdetect is not None:
        overrides["misdetection_prob"] = args.misdetect
    if getattr(args, "delta", None) is not None:
        overrides["delta_grid"] = args.delta
    if getattr(args, "gaps", None) is not None:
        overrides["gap_list_db"] = args.gaps
    if getattr(args, "beta_db", None) is not None:
        overrides["sinr_threshold_db"] = args.beta_db
    if getattr(args, "noise_db", None) is not None:
        overrides["noise_floor_db"] = args.noise_db
    if getattr(args, "radios", None) is not None:
        overrides["n_radios"] = args.radios
    if getattr(args, "paper_faithful", None):
        overrides["paper_faithful"] = True
    cfg = factory(**overrides)
    out = args.out if args.out is not None else default_out
    return cfg, out


def _deliver(report: ExperimentReport, out: str) -> None:
    if out == "-":
        sys.stdout.write(report_to_csv(report))
    else:
        emit_csv(report, out)
        print(f"wrote {len(report.rows)} rows to {out} "
              f"(master_seed={report.master_seed})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aoisim",
        description="Slotted random-access AoI simulator and analysis toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_e1 = sub.add_parser("e1", help="small-network threshold sweep")
    _add_common(p_e1)
    p_e1.add_argument("--delta", type=_int_list, help="threshold grid")
    p_e1.add_argument("--paper-faithful", action="store_true", default=None,
                      dest="paper_faithful",
                      help="single 800-slot run per point instead of averaging")

    p_e2 = sub.add_parser("e2", help="multiplexed scaling sweep")
    _add_common(p_e2)
    p_e2.add_argument("--radios", type=int, help="radio count (default 8)")

    p_e3 = sub.add_parser("e3", help="imbalanced received-power sweep")
    _add_common(p_e3)
    p_e3.add_argument("--gaps", type=_float_list, help="power gaps in dB")
    p_e3.add_argument("--beta-db", type=float, dest="beta_db",
                      help="capture SINR threshold")
    p_e3.add_argument("--noise-db", type=float, dest="noise_db",
                      help="noise floor in dB")

    p_c = sub.add_parser("custom", help="single operating point")
    _add_common(p_c)
    p_c.add_argument("--protocol", choices=("aira", "adra"))
    p_c.add_argument("--delta", type=int, help="ADRA age threshold")
    p_c.add_argument("--p", type=float, help="access probability "
                     "(default: optimized)")
    p_c.add_argument("--channel", choices=("collision", "capture"))
    p_c.add_argument("--beta-db", type=float, dest="beta_db")
    p_c.add_argument("--noise-db", type=float, dest="noise_db")
    p_c.add_argument("--radios", type=int)
    p_c.add_argument("--power-db", type=float, dest="power_db",
                     help="received power for all devices")

    p_a = sub.add_parser("analytic", help="closed-form values at a point")
    p_a.add_argument("--n", type=int, required=True)
    p_a.add_argument("--delta", type=int, default=1)
    p_a.add_argument("--p", type=float)
    return parser


def _cmd_analytic(args: argparse.Namespace) -> int:
    n = args.n
    p_star = aira_optimal_cap(n)
    p = args.p if args.p is not None else p_star
    print(f"n={n} delta={args.delta}")
    print(f"aira optimal cap     : {p_star:.6f}")
    print(f"aira average aoi (p={p:.4f}): {aira_average_aoi(n, p):.6f}")
    p_adra = args.p if args.p is not None else adra_optimize_cap(n, args.delta)
    print(f"adra optimized cap   : {p_adra:.6f}")
    print(f"adra average aoi (p={p_adra:.4f}): "
          f"{adra_average_aoi(n, args.delta, p_adra):.6f}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "analytic":
        return _cmd_analytic(args)
    _apply_config_file(args)

    if args.command == "e1":
        cfg, out = _experiment_config(args, e1_config, "aoisim_e1.csv")
        _deliver(run_experiment_e1(cfg), out)
    elif args.command == "e2":
        cfg, out = _experiment_config(args, e2_config, "aoisim_e2.csv")
        _deliver(run_experiment_e2(cfg), out)
    elif args.command == "e3":
        cfg, out = _experiment_config(args, e3_config, "aoisim_e3.csv")
        _deliver(run_experiment_e3(cfg), out)
    elif args.command == "custom":
        overrides: dict = {"experiment": "custom"}
        if args.n is not None:
            overrides["n_list"] = args.n
        if args.horizon is not None:
            overrides["horizon"] = args.horizon
        if args.seed is not None:
            overrides["master_seed"] = args.seed
        if args.replications is not None:
            overrides["replications"] = args.replications
        if args.misdetect is not None:
            overrides["misdetection_prob"] = args.misdetect
        if args.channel == "capture":
            overrides["channel_model"] = ChannelModel.CAPTURE
        if args.beta_db is not None:
            overrides["sinr_threshold_db"] = args.beta_db
        if args.noise_db is not None:
            overrides["noise_floor_db"] = args.noise_db
        if args.radios is not None:
            overrides["n_radios"] = args.radios
        if args.power_db is not None:
            overrides["base_power_db"] = args.power_db
        if not overrides.get("n_list"):
            overrides["n_list"] = (8,)
        cfg = ExperimentConfig(**overrides)
        report = run_custom(
            cfg,
            protocol=args.protocol or "aira",
            delta=args.delta if args.delta is not None else 1,
            p=args.p,
        )
        _deliver(report, args.out if args.out is not None else "-")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
