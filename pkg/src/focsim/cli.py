"""Command-line front end.

Every subcommand reads an optional JSON config, applies flag overrides,
runs one campaign, and emits a single table to stdout or --out. Timing
goes to stderr so the emitted bytes depend only on the configuration.

Exit codes: 0 success, 2 configuration error, 3 numeric domain error,
4 output I/O failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace

import numpy as np

from .config import AppConfig, default_config, load_config, serialize_config
from .elements import FocsScenario, detected_intensity
from .errors import ConfigError, FocsimError, FringeNullError, NumericDomainError
from .experiments import (
    run_convergence_ladder,
    run_current_sweep,
    run_xi_sweep,
    run_perturbation_study,
    CurrentSweepSpec,
)
from .spun import grid_for, propagate_trajectory
from .tables import ResultTable, render

_SWEEP_COLUMNS = ("current_a", "faraday_rad", "i_out", "i_ideal", "relative_error_pct")


def _simulate(cfg: AppConfig) -> ResultTable:
    fe = cfg.front_end.build()
    coil = cfg.coil.build()
    scenario = FocsScenario(
        coil=coil,
        waveplate=fe.waveplate,
        converter_override=fe.converter_override(),
    )
    try:
        r = detected_intensity(scenario)
    except FringeNullError as exc:
        raise FringeNullError(
            f"current_a={cfg.coil.current_a}: {exc}"
        ) from exc
    return ResultTable(
        columns=_SWEEP_COLUMNS,
        rows=(
            (
                cfg.coil.current_a,
                coil.rotation_angle_f_rad,
                r.i_out,
                r.i_ideal,
                r.relative_error_pct,
            ),
        ),
        grid_n=cfg.front_end.n_segments or None,
    )


def _trajectory(cfg: AppConfig) -> ResultTable:
    medium = cfg.medium.build()
    traj = propagate_trajectory(
        medium,
        grid_for(medium, cfg.trajectory.n_segments),
        metric_kind=cfg.trajectory.metric_kind,
    )
    n = cfg.trajectory.n_segments
    idx = list(range(0, n + 1, cfg.trajectory.stride))
    if idx[-1] != n:
        idx.append(n)
    rows = tuple(
        (float(traj.z_m[i]), float(traj.epsilon[i])) for i in idx
    )
    return ResultTable(
        columns=("z_m", "epsilon"),
        rows=rows,
        grid_n=n,
        extra_metadata=(("metric", cfg.trajectory.metric_kind),),
    )


def _sweep_current(cfg: AppConfig) -> ResultTable:
    currents = np.linspace(0.0, cfg.current_sweep.max_a, cfg.current_sweep.points)
    spec = CurrentSweepSpec(
        front_end=cfg.front_end.build(),
        currents_a=tuple(currents),
        verdet_rad_per_amp_turn=cfg.coil.verdet_rad_per_amp_turn,
        turns=cfg.coil.turns,
    )
    res = run_current_sweep(spec)
    rows = tuple(
        (
            float(res.currents_a[i]),
            float(res.faraday_rad[i]),
            float(res.i_out[i]),
            float(res.i_ideal[i]),
            float(res.err_pct[i]),
        )
        for i in range(len(res.currents_a))
    )
    return ResultTable(
        columns=_SWEEP_COLUMNS,
        rows=rows,
        grid_n=cfg.front_end.n_segments or None,
    )


def _sweep_xi(cfg: AppConfig) -> ResultTable:
    rows = []
    for kind in cfg.xi_sweep.profiles:
        medium = replace(cfg.medium, profile=replace(cfg.medium.profile, kind=kind)).build()
        res = run_xi_sweep(medium, cfg.xi_sweep.ratios, cfg.xi_sweep.n_segments)
        for r in res.rows:
            rows.append(
                (
                    kind,
                    r.xi_over_delta,
                    r.delta_eps_pp_settled,
                    r.rms_eps_settled,
                    r.mean_eps_settled,
                    r.delta_eps_pp_full,
                    r.conversion_length_m,
                    r.ripple_flagged,
                )
            )
    return ResultTable(
        columns=(
            "profile",
            "xi_over_delta",
            "delta_eps_pp_settled",
            "rms_eps_settled",
            "mean_eps_settled",
            "delta_eps_pp_full",
            "conversion_length_m",
            "ripple_flagged",
        ),
        rows=tuple(rows),
        grid_n=cfg.xi_sweep.n_segments,
    )


def _perturb(cfg: AppConfig) -> ResultTable:
    res = run_perturbation_study(
        cfg.medium.build(),
        cfg.perturbation.n_segments,
        wavelength_drift_m=cfg.perturbation.wavelength_drift_m,
        temperature_excursion_c=cfg.perturbation.temperature_excursion_c,
    )
    rows = tuple(
        (
            ax.label,
            ax.low_value,
            ax.high_value,
            res.base_pp,
            ax.pp_increase_pct,
            res.base_rms,
            ax.rms_increase_pct,
        )
        for ax in (res.wavelength, res.temperature)
    )
    return ResultTable(
        columns=(
            "axis",
            "low_value",
            "high_value",
            "base_delta_eps_pp",
            "delta_eps_pp_increase_pct",
            "base_rms_eps",
            "rms_eps_increase_pct",
        ),
        rows=rows,
        grid_n=cfg.perturbation.n_segments,
    )


def _converge(cfg: AppConfig) -> ResultTable:
    res = run_convergence_ladder(
        cfg.medium.build(),
        cfg.convergence.segment_counts,
        cfg.convergence.reference_n,
    )
    ratios = res.ratios() + (None,)
    rows = tuple(
        (row.n_segments, row.max_abs_dev, ratios[i])
        for i, row in enumerate(res.rows)
    )
    return ResultTable(
        columns=("n_segments", "max_abs_dev", "ratio"),
        rows=rows,
        grid_n=cfg.convergence.reference_n,
    )


_RUNNERS = {
    "simulate": _simulate,
    "trajectory": _trajectory,
    "sweep-current": _sweep_current,
    "sweep-xi": _sweep_xi,
    "perturb": _perturb,
    "converge": _converge,
}


def _csv_list(cast):
    def parse(text: str):
        try:
            return tuple(cast(part) for part in text.split(","))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc

    return parse


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    common.add_argument("--config", metavar="PATH", help="JSON scenario config")
    common.add_argument(
        "--seedless",
        action="store_true",
        help="accepted for interface compatibility; output is always deterministic",
    )

    parser = argparse.ArgumentParser(
        prog="focsim",
        description="Jones-calculus simulator for reflective fiber-optic current sensors",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="one round trip at one current")
    p.add_argument("--current-a", type=float, dest="current_a")

    p = sub.add_parser("trajectory", parents=[common], help="ellipticity along the medium")
    p.add_argument("--segments", type=int, dest="segments")
    p.add_argument("--stride", type=int, dest="stride")
    p.add_argument("--metric", choices=("principal", "axis_ratio"), dest="metric")

    p = sub.add_parser("sweep-current", parents=[common], help="detected intensity vs current")
    p.add_argument("--max-a", type=float, dest="max_a")
    p.add_argument("--points", type=int, dest="points")

    p = sub.add_parser("sweep-xi", parents=[common], help="ripple vs spin-rate ratio")
    p.add_argument("--ratios", type=_csv_list(float), dest="ratios")
    p.add_argument("--profiles", type=_csv_list(str), dest="profiles")
    p.add_argument("--segments", type=int, dest="segments")

    p = sub.add_parser("perturb", parents=[common], help="wavelength/temperature drift study")
    p.add_argument("--segments", type=int, dest="segments")

    p = sub.add_parser("converge", parents=[common], help="grid refinement report")
    p.add_argument("--counts", type=_csv_list(int), dest="counts")
    p.add_argument("--reference-n", type=int, dest="reference_n")

    p = sub.add_parser(
        "print-config", parents=[common], help="emit the fully resolved configuration"
    )
    return parser


def _apply_overrides(cfg: AppConfig, args: argparse.Namespace) -> AppConfig:
    def opt(name):
        return getattr(args, name, None)

    if opt("current_a") is not None:
        cfg = replace(cfg, coil=replace(cfg.coil, current_a=args.current_a))
    if opt("max_a") is not None:
        cfg = replace(cfg, current_sweep=replace(cfg.current_sweep, max_a=args.max_a))
    if opt("points") is not None:
        cfg = replace(cfg, current_sweep=replace(cfg.current_sweep, points=args.points))
    if opt("stride") is not None:
        cfg = replace(cfg, trajectory=replace(cfg.trajectory, stride=args.stride))
    if opt("metric") is not None:
        cfg = replace(cfg, trajectory=replace(cfg.trajectory, metric_kind=args.metric))
    if opt("ratios") is not None:
        cfg = replace(cfg, xi_sweep=replace(cfg.xi_sweep, ratios=args.ratios))
    if opt("profiles") is not None:
        for kind in args.profiles:
            if kind not in ("linear", "cosine", "constant"):
                raise ConfigError(f"unknown profile kind {kind!r}", "xi_sweep.profiles")
        cfg = replace(cfg, xi_sweep=replace(cfg.xi_sweep, profiles=args.profiles))
    if opt("counts") is not None:
        cfg = replace(
            cfg, convergence=replace(cfg.convergence, segment_counts=args.counts)
        )
    if opt("reference_n") is not None:
        cfg = replace(
            cfg, convergence=replace(cfg.convergence, reference_n=args.reference_n)
        )
    if opt("segments") is not None:
        if args.command == "trajectory":
            cfg = replace(cfg, trajectory=replace(cfg.trajectory, n_segments=args.segments))
        elif args.command == "sweep-xi":
            cfg = replace(cfg, xi_sweep=replace(cfg.xi_sweep, n_segments=args.segments))
        elif args.command == "perturb":
            cfg = replace(cfg, perturbation=replace(cfg.perturbation, n_segments=args.segments))
    if opt("counts") is not None or opt("reference_n") is not None:
        if any(c >= cfg.convergence.reference_n for c in cfg.convergence.segment_counts):
            raise ConfigError(
                "reference_n must exceed every probe count", "convergence.reference_n"
            )
    return cfg


def _write_out(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        cfg = load_config(args.config) if args.config else default_config()
        cfg = _apply_overrides(cfg, args)
        if args.command == "print-config":
            text = serialize_config(cfg)
        else:
            text = render(_RUNNERS[args.command](cfg), args.format)
    except ConfigError as exc:
        print(f"focsim: config error: {exc}", file=sys.stderr)
        return 2
    except NumericDomainError as exc:
        print(f"focsim: numeric domain error: {exc}", file=sys.stderr)
        return 3
    except FocsimError as exc:
        print(f"focsim: {exc}", file=sys.stderr)
        return 3
    try:
        _write_out(text, args.out)
    except OSError as exc:
        print(f"focsim: cannot write output: {exc}", file=sys.stderr)
        return 4
    print(f"focsim: {args.command} finished in {time.perf_counter() - started:.3f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
