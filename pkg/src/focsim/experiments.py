"""Measurement campaigns built from the optical chain primitives.

Each runner is a pure function from a frozen parameter record to an
immutable result, so campaigns parallelize trivially. Worker count comes from
FOCSIM_THREADS; results are collected in submission order and every row is
computed by deterministic code, so the output bytes never depend on the
thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import numpy.typing as npt

from .constants import constant
from .elements import (
    FaradayCoil,
    FocsScenario,
    ImperfectWaveplate,
    detected_intensity,
)
from .errors import FringeNullError
from .jones import JonesMatrix
from .spun import (
    EllipticityTrajectory,
    SpunMediumSpec,
    StabilityMetrics,
    conversion_length,
    grid_for,
    propagate_trajectory,
    stability_metrics,
    total_matrix,
)

_FRINGE_FLOOR = 1e-15


def worker_count() -> int:
    raw = os.environ.get("FOCSIM_THREADS", "").strip()
    if not raw:
        return 1
    n = int(raw)
    if n < 1:
        raise ValueError("FOCSIM_THREADS must be a positive integer")
    return n


def _map_ordered(fn, items):
    n = worker_count()
    items = list(items)
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class FrontEnd:
    """Polarization converter placed between the 45 degree splice and the coil.

    ideal and imperfect_qwp are discrete waveplates; spun_fiber and
    high_order_qwp are distributed media whose converter matrix is the
    propagation product over the whole medium. Distributed variants are
    described entirely by the medium geometry, there is no mounting angle
    to misalign.
    """

    kind: str
    waveplate: ImperfectWaveplate | None = None
    medium: SpunMediumSpec | None = None
    n_segments: int = 0

    def __post_init__(self):
        if self.kind == "ideal":
            if self.waveplate is not None or self.medium is not None:
                raise ValueError("ideal front end takes no parameters")
        elif self.kind == "imperfect_qwp":
            if self.waveplate is None or self.medium is not None:
                raise ValueError("imperfect_qwp front end needs exactly a waveplate")
        elif self.kind in ("spun_fiber", "high_order_qwp"):
            if self.medium is None or self.waveplate is not None:
                raise ValueError(f"{self.kind} front end needs exactly a medium")
            if self.n_segments < 1:
                raise ValueError("distributed front end needs a segment count")
            ramped = self.medium.profile.kind in ("linear", "cosine")
            if self.kind == "high_order_qwp" and not ramped:
                raise ValueError("high_order_qwp needs a ramped spin profile")
            if self.kind == "spun_fiber" and self.medium.profile.kind != "constant":
                raise ValueError("spun_fiber needs a constant spin profile")
        else:
            raise ValueError(f"unknown front end kind {self.kind!r}")

    def converter_override(self) -> tuple[JonesMatrix, JonesMatrix] | None:
        """Forward and return converter matrices for distributed variants.

        The return pass traverses the same medium backwards; for a
        reciprocal retarder chain that is the matrix transpose.
        """
        if self.medium is None:
            return None
        fwd = total_matrix(self.medium, grid_for(self.medium, self.n_segments))
        return fwd, fwd.T


def front_end_ideal() -> FrontEnd:
    return FrontEnd(kind="ideal")


def front_end_imperfect(waveplate: ImperfectWaveplate) -> FrontEnd:
    return FrontEnd(kind="imperfect_qwp", waveplate=waveplate)


def front_end_spun(medium: SpunMediumSpec, n_segments: int) -> FrontEnd:
    return FrontEnd(kind="spun_fiber", medium=medium, n_segments=n_segments)


def front_end_high_order(medium: SpunMediumSpec, n_segments: int) -> FrontEnd:
    return FrontEnd(kind="high_order_qwp", medium=medium, n_segments=n_segments)


def default_coil() -> FaradayCoil:
    return FaradayCoil.from_current(
        verdet_rad_per_amp_turn=float(constant("verdet_rad_per_amp_turn")),
        turns=int(constant("coil_turns")),
        current_a=0.0,
    )


def default_current_grid() -> npt.NDArray[np.float64]:
    return np.linspace(
        0.0, float(constant("current_max_a")), int(constant("current_points"))
    )


def device_delta() -> float:
    """Linear birefringence rate of the front-end fiber, rad/m."""
    return (
        2.0
        * math.pi
        * float(constant("birefringence_delta_n"))
        / float(constant("wavelength_m"))
    )


@dataclass(frozen=True)
class CurrentSweepSpec:
    front_end: FrontEnd
    currents_a: tuple[float, ...]
    verdet_rad_per_amp_turn: float
    turns: int


def default_sweep_spec(front_end: FrontEnd | None = None) -> CurrentSweepSpec:
    return CurrentSweepSpec(
        front_end=front_end if front_end is not None else front_end_ideal(),
        currents_a=tuple(default_current_grid()),
        verdet_rad_per_amp_turn=float(constant("verdet_rad_per_amp_turn")),
        turns=int(constant("coil_turns")),
    )


@dataclass(frozen=True)
class SweepResult:
    """Detected and reference intensities across a current grid.

    err_pct is NaN on fringe-null rows (reference intensity at the noise
    floor); those rows are excluded from the summary statistics.
    """

    currents_a: npt.NDArray[np.float64]
    faraday_rad: npt.NDArray[np.float64]
    i_out: npt.NDArray[np.float64]
    i_ideal: npt.NDArray[np.float64]
    err_pct: npt.NDArray[np.float64]
    max_abs_err_pct: float
    mean_abs_err_pct: float
    n_fringe_null: int


def run_current_sweep(spec: CurrentSweepSpec) -> SweepResult:
    override = spec.front_end.converter_override()
    currents = np.asarray(spec.currents_a, dtype=np.float64)

    def one(current: float):
        coil = FaradayCoil.from_current(
            verdet_rad_per_amp_turn=spec.verdet_rad_per_amp_turn,
            turns=spec.turns,
            current_a=current,
        )
        scenario = FocsScenario(
            coil=coil,
            waveplate=spec.front_end.waveplate,
            converter_override=override,
        )
        try:
            r = detected_intensity(scenario)
            return coil.rotation_angle_f_rad, r.i_out, r.i_ideal, r.relative_error_pct
        except FringeNullError:
            f = coil.rotation_angle_f_rad
            return f, float("nan"), math.cos(2 * f) ** 2, float("nan")

    rows = _map_ordered(one, currents)
    f = np.array([r[0] for r in rows])
    i_out = np.array([r[1] for r in rows])
    i_ideal = np.array([r[2] for r in rows])
    err = np.array([r[3] for r in rows])
    ok = ~np.isnan(err)
    return SweepResult(
        currents_a=currents,
        faraday_rad=f,
        i_out=i_out,
        i_ideal=i_ideal,
        err_pct=err,
        max_abs_err_pct=float(np.max(np.abs(err[ok]))) if ok.any() else float("nan"),
        mean_abs_err_pct=float(np.mean(np.abs(err[ok]))) if ok.any() else float("nan"),
        n_fringe_null=int((~ok).sum()),
    )


@dataclass(frozen=True)
class ImperfectionCell:
    cut_deviation_m: float
    splice_angle_rad: float
    max_abs_err_pct: float


@dataclass(frozen=True)
class ImperfectionScanResult:
    cells: tuple[ImperfectionCell, ...]
    worst_err_pct: float


def run_imperfection_scan(
    cut_deviations_m: tuple[float, ...],
    splice_angles_rad: tuple[float, ...],
    currents_a: tuple[float, ...] | None = None,
) -> ImperfectionScanResult:
    """Worst-case sweep error over a grid of plate build tolerances."""
    if currents_a is None:
        currents_a = tuple(default_current_grid())
    combos = [(d, b) for d in cut_deviations_m for b in splice_angles_rad]

    def one(combo):
        d, b = combo
        plate = ImperfectWaveplate.from_cut_deviation(
            cut_deviation_m=d, splice_angle_rad=b
        )
        spec = replace(
            default_sweep_spec(front_end_imperfect(plate)), currents_a=currents_a
        )
        return ImperfectionCell(d, b, run_current_sweep(spec).max_abs_err_pct)

    cells = tuple(_map_ordered(one, combos))
    return ImperfectionScanResult(
        cells=cells,
        worst_err_pct=max(c.max_abs_err_pct for c in cells),
    )


@dataclass(frozen=True)
class XiSweepRow:
    xi_over_delta: float
    delta_eps_pp_settled: float
    rms_eps_settled: float
    mean_eps_settled: float
    delta_eps_pp_full: float
    conversion_length_m: float | None
    ripple_flagged: bool


@dataclass(frozen=True)
class XiSweepResult:
    profile_kind: str
    rows: tuple[XiSweepRow, ...]


def run_xi_sweep(
    base_medium: SpunMediumSpec,
    ratios: tuple[float, ...],
    n_segments: int,
    flag_above_pp: float = 0.01,
    threshold: float = 0.95,
) -> XiSweepResult:
    """Adiabaticity scan: one trajectory per spin-rate-to-birefringence ratio."""

    def one(ratio: float):
        profile = _with_xi_max(
            base_medium.profile, ratio * base_medium.delta_rad_per_m
        )
        medium = SpunMediumSpec(
            base_medium.total_length_m, base_medium.delta_rad_per_m, profile
        )
        traj = propagate_trajectory(medium, grid_for(medium, n_segments))
        settled = stability_metrics(traj)
        return XiSweepRow(
            xi_over_delta=ratio,
            delta_eps_pp_settled=settled.delta_eps_pp,
            rms_eps_settled=settled.rms_eps,
            mean_eps_settled=settled.mean_eps,
            delta_eps_pp_full=traj.delta_eps_pp,
            conversion_length_m=conversion_length(traj, threshold),
            ripple_flagged=settled.delta_eps_pp > flag_above_pp,
        )

    return XiSweepResult(
        profile_kind=base_medium.profile.kind,
        rows=tuple(_map_ordered(one, ratios)),
    )


def _with_xi_max(profile, xi_max: float):
    return replace(profile, xi_max_rad_per_m=xi_max)


@dataclass(frozen=True)
class PerturbationAxis:
    label: str
    low_value: float
    high_value: float
    pp_increase_pct: float
    rms_increase_pct: float


@dataclass(frozen=True)
class PerturbationResult:
    base_pp: float
    base_rms: float
    wavelength: PerturbationAxis
    temperature: PerturbationAxis


def delta_at_wavelength(delta0: float, wavelength0_m: float, wavelength_m: float) -> float:
    """Birefringence rescaled by inverse wavelength."""
    return delta0 * wavelength0_m / wavelength_m


def delta_at_temperature(delta0: float, temperature_c: float) -> float:
    """Birefringence with its linear temperature coefficient applied."""
    k = float(constant("temperature_coeff_per_c"))
    t0 = float(constant("reference_temperature_c"))
    return delta0 * (1.0 + k * (temperature_c - t0))


def run_perturbation_study(
    medium: SpunMediumSpec,
    n_segments: int,
    wavelength0_m: float | None = None,
    wavelength_drift_m: float | None = None,
    temperature_excursion_c: float | None = None,
) -> PerturbationResult:
    """Ripple sensitivity to wavelength and temperature drift.

    The spin profile is fabricated geometry and never moves; only the
    birefringence rate responds to the environment. Each axis reports the
    worse of its two extremes, so an increase on one side is not masked by
    a decrease on the other.
    """
    lam0 = wavelength0_m if wavelength0_m is not None else float(constant("wavelength_m"))
    dlam = (
        wavelength_drift_m
        if wavelength_drift_m is not None
        else float(constant("wavelength_drift_m"))
    )
    dtemp = (
        temperature_excursion_c
        if temperature_excursion_c is not None
        else float(constant("temperature_excursion_c"))
    )
    t0 = float(constant("reference_temperature_c"))
    d0 = medium.delta_rad_per_m

    def metrics_at(delta: float) -> StabilityMetrics:
        m = medium.with_delta(delta)
        return stability_metrics(propagate_trajectory(m, grid_for(m, n_segments)))

    jobs = [
        d0,
        delta_at_wavelength(d0, lam0, lam0 - dlam),
        delta_at_wavelength(d0, lam0, lam0 + dlam),
        delta_at_temperature(d0, t0 - dtemp),
        delta_at_temperature(d0, t0 + dtemp),
    ]
    base, wl_lo, wl_hi, t_lo, t_hi = _map_ordered(metrics_at, jobs)

    def axis(label, lo_val, hi_val, lo_m, hi_m) -> PerturbationAxis:
        pp = 100.0 * (max(lo_m.delta_eps_pp, hi_m.delta_eps_pp) / base.delta_eps_pp - 1.0)
        rms = 100.0 * (max(lo_m.rms_eps, hi_m.rms_eps) / base.rms_eps - 1.0)
        return PerturbationAxis(label, lo_val, hi_val, pp, rms)

    return PerturbationResult(
        base_pp=base.delta_eps_pp,
        base_rms=base.rms_eps,
        wavelength=axis("wavelength_m", lam0 - dlam, lam0 + dlam, wl_lo, wl_hi),
        temperature=axis("temperature_c", t0 - dtemp, t0 + dtemp, t_lo, t_hi),
    )


@dataclass(frozen=True)
class ConvergenceRow:
    n_segments: int
    max_abs_dev: float


@dataclass(frozen=True)
class ConvergenceResult:
    rows: tuple[ConvergenceRow, ...]
    reference_n: int

    def ratios(self) -> tuple[float, ...]:
        devs = [r.max_abs_dev for r in self.rows]
        return tuple(a / b for a, b in zip(devs, devs[1:]))


def run_convergence_ladder(
    medium: SpunMediumSpec,
    segment_counts: tuple[int, ...],
    reference_n: int,
) -> ConvergenceResult:
    """Max elementwise deviation of the total matrix versus a fine reference."""
    if any(n >= reference_n for n in segment_counts):
        raise ValueError("reference grid must be finer than every probe grid")
    ref = total_matrix(medium, grid_for(medium, reference_n))

    def one(n: int) -> ConvergenceRow:
        m = total_matrix(medium, grid_for(medium, n))
        return ConvergenceRow(n, float(np.max(np.abs(m - ref))))

    return ConvergenceResult(
        rows=tuple(_map_ordered(one, segment_counts)),
        reference_n=reference_n,
    )


def default_demo_medium() -> SpunMediumSpec:
    """The lab-bench medium used by default across campaigns."""
    from .spun import SpinProfile

    delta = 2.0 * math.pi / float(constant("medium_beat_length_m"))
    profile = SpinProfile(
        kind=str(constant("medium_profile")),
        xi_max_rad_per_m=float(constant("medium_xi_over_delta")) * delta,
        lead_in_l1_m=float(constant("medium_lead_in_m")),
        transition_l2_m=float(constant("medium_transition_m")),
    )
    return SpunMediumSpec(
        total_length_m=float(constant("medium_total_length_m")),
        delta_rad_per_m=delta,
        profile=profile,
    )


def default_high_order_front_end() -> FrontEnd:
    from .spun import SpinProfile

    delta = device_delta()
    profile = SpinProfile(
        kind="cosine",
        xi_max_rad_per_m=float(constant("ho_qwp_xi_over_delta")) * delta,
        lead_in_l1_m=0.0,
        transition_l2_m=float(constant("ho_qwp_transition_m")),
    )
    medium = SpunMediumSpec(
        total_length_m=float(constant("ho_qwp_total_length_m")),
        delta_rad_per_m=delta,
        profile=profile,
    )
    return front_end_high_order(medium, int(constant("front_end_segments")))


def default_spun_front_end() -> FrontEnd:
    from .spun import SpinProfile

    delta = device_delta()
    profile = SpinProfile(
        kind="constant",
        xi_max_rad_per_m=float(constant("spun_fiber_xi_over_delta")) * delta,
    )
    medium = SpunMediumSpec(
        total_length_m=float(constant("spun_fiber_total_length_m")),
        delta_rad_per_m=delta,
        profile=profile,
    )
    return front_end_spun(medium, int(constant("front_end_segments")))
