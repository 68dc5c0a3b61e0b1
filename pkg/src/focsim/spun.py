"""Discretized propagation through spun birefringent media.

A spun medium is a linear retarder whose fast axis orientation theta(z)
rotates along the fiber at a prescribed spin rate xi(z). Propagation is the
ordered product of per-segment rotated retarders,

    J = J_N ... J_2 J_1,
    J_k = R(theta_k) diag(e^{+i delta dz / 2}, e^{-i delta dz / 2}) R(-theta_k),

with theta_k the spin angle at the segment's left endpoint. The left-endpoint
rule makes the product error fall off as 1/N, the first-order behavior the
convergence contract asserts; evaluating theta at the segment midpoint is
available as an option and converges at second order instead.

Products and trajectory scans are evaluated in a fixed chunked order, so
results are bit-reproducible regardless of worker count or platform thread
settings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import numpy.typing as npt

from .constants import constant
from .errors import (
    EmptyWindowError,
    NumericDomainError,
    UnsupportedProfileError,
)
from .jones import JonesMatrix, JonesVector, jones_vector

_CHUNK = 1 << 19

ProfileKind = Literal["linear", "cosine", "constant", "sampled"]
MetricKind = Literal["principal", "axis_ratio"]


@dataclass(frozen=True)
class SpinProfile:
    """Spin-rate law xi(z).

    linear and cosine ramp from 0 at the end of the unspun lead L1 up to
    xi_max at L1 + L2, then stay at xi_max (uniformly spun continuation).
    The cosine ramp has a continuous derivative at both ends of the
    transition; the linear ramp does not, and that asymmetry is the whole
    point of comparing them. constant spins at xi_max everywhere, modeling
    conventional spun fiber. sampled interpolates a measured (z, xi) table.
    """

    kind: ProfileKind
    xi_max_rad_per_m: float
    lead_in_l1_m: float = 0.0
    transition_l2_m: float = 0.0
    samples: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.kind in ("linear", "cosine") and self.transition_l2_m <= 0.0:
            raise ValueError(f"{self.kind} profile needs a positive transition length")
        if self.kind == "sampled":
            if not self.samples or len(self.samples) < 2:
                raise ValueError("sampled profile needs at least two (z, xi) pairs")
            zs = [z for z, _ in self.samples]
            if any(b <= a for a, b in zip(zs, zs[1:])):
                raise ValueError("sampled z values must strictly increase")

    def spin_rate(self, z):
        """xi at position z (rad/m). Accepts scalars or arrays."""
        z = np.asarray(z, dtype=np.float64)
        if np.any(z < 0.0):
            raise NumericDomainError("spin profile undefined for z < 0")
        if self.kind == "constant":
            out = np.full_like(z, self.xi_max_rad_per_m)
        elif self.kind == "sampled":
            zs = np.array([p[0] for p in self.samples])
            xs = np.array([p[1] for p in self.samples])
            out = np.interp(z, zs, xs)
        else:
            u = np.clip((z - self.lead_in_l1_m) / self.transition_l2_m, 0.0, 1.0)
            if self.kind == "linear":
                out = self.xi_max_rad_per_m * u
            else:
                out = self.xi_max_rad_per_m * (0.5 - 0.5 * np.cos(np.pi * u))
        return out if out.ndim else float(out)

    def spin_angle(self, z):
        """Cumulative axis orientation theta(z) = integral of xi. Radians."""
        z = np.asarray(z, dtype=np.float64)
        if np.any(z < 0.0):
            raise NumericDomainError("spin profile undefined for z < 0")
        if self.kind == "constant":
            out = self.xi_max_rad_per_m * z
        elif self.kind == "sampled":
            out = self._sampled_angle(z)
        else:
            l1, l2, xm = self.lead_in_l1_m, self.transition_l2_m, self.xi_max_rad_per_m
            u = np.clip(z - l1, 0.0, l2)
            if self.kind == "linear":
                ramp = xm * u * u / (2.0 * l2)
            else:
                ramp = xm * (0.5 * u - (0.5 * l2 / np.pi) * np.sin(np.pi * u / l2))
            out = ramp + xm * np.clip(z - l1 - l2, 0.0, None)
        return out if out.ndim else float(out)

    def _sampled_angle(self, z: npt.NDArray[np.float64]):
        zs = np.array([p[0] for p in self.samples])
        xs = np.array([p[1] for p in self.samples])
        knots = np.concatenate([[0.0], np.cumsum(0.5 * (xs[1:] + xs[:-1]) * np.diff(zs))])
        # the rate clamps to its end values outside the table, so the
        # integral runs at xs[0] before the first knot and xs[-1] after the
        # last; inside, the trapezoid partial sums are exact for the
        # piecewise-linear rate
        knots += xs[0] * zs[0]
        idx = np.clip(np.searchsorted(zs, z, side="right") - 1, 0, len(zs) - 2)
        inside = knots[idx] + 0.5 * (xs[idx] + np.interp(z, zs, xs)) * (z - zs[idx])
        below = xs[0] * z
        above = knots[-1] + xs[-1] * (z - zs[-1])
        return np.where(z < zs[0], below, np.where(z > zs[-1], above, inside))


@dataclass(frozen=True)
class SpunMediumSpec:
    """Geometry and material state of one spun medium."""

    total_length_m: float
    delta_rad_per_m: float
    profile: SpinProfile

    def __post_init__(self):
        if self.total_length_m <= 0.0:
            raise ValueError("total length must be positive")
        if self.profile.kind in ("linear", "cosine"):
            settle = self.profile.lead_in_l1_m + self.profile.transition_l2_m
            if self.total_length_m + 1e-12 < settle:
                raise ValueError("medium shorter than lead-in plus transition")

    @property
    def beat_length_m(self) -> float:
        return 2 * math.pi / self.delta_rad_per_m

    @property
    def xi_over_delta(self) -> float:
        return self.profile.xi_max_rad_per_m / self.delta_rad_per_m

    @property
    def settle_z_m(self) -> float:
        """Start of the post-transition region."""
        if self.profile.kind in ("linear", "cosine"):
            return self.profile.lead_in_l1_m + self.profile.transition_l2_m
        return 0.0

    def with_delta(self, delta_rad_per_m: float) -> "SpunMediumSpec":
        """Same fabricated geometry under a different birefringence.

        The spin profile is frozen into the fiber when it is drawn, so
        environmental drift rescales delta only, never xi(z).
        """
        return SpunMediumSpec(self.total_length_m, delta_rad_per_m, self.profile)

    def with_total_length(self, total_length_m: float) -> "SpunMediumSpec":
        return SpunMediumSpec(total_length_m, self.delta_rad_per_m, self.profile)


@dataclass(frozen=True)
class PropagationGrid:
    """Uniform segmentation of [0, L] into n_segments pieces."""

    n_segments: int
    total_length_m: float

    def __post_init__(self):
        if self.n_segments < 1:
            raise ValueError("need at least one segment")
        if self.total_length_m <= 0.0:
            raise ValueError("grid length must be positive")

    @property
    def dz_m(self) -> float:
        return self.total_length_m / self.n_segments

    def z_samples(self) -> npt.NDArray[np.float64]:
        """The n_segments + 1 state positions, 0 through L inclusive."""
        return np.linspace(0.0, self.total_length_m, self.n_segments + 1)


def grid_for(spec: SpunMediumSpec, n_segments: int) -> PropagationGrid:
    return PropagationGrid(n_segments, spec.total_length_m)


def segment_matrix(delta_rad_per_m: float, theta_rad: float, dz_m: float) -> JonesMatrix:
    """Rotated linear retarder for one segment."""
    if dz_m <= 0.0:
        raise ValueError("segment length must be positive")
    half = 0.5 * delta_rad_per_m * dz_m
    ep = complex(math.cos(half), math.sin(half))
    em = ep.conjugate()
    c, s = math.cos(theta_rad), math.sin(theta_rad)
    return np.array(
        [
            [ep * c * c + em * s * s, (ep - em) * c * s],
            [(ep - em) * c * s, ep * s * s + em * c * c],
        ],
        dtype=np.complex128,
    )


def _segment_block(
    spec: SpunMediumSpec,
    n: int,
    lo: int,
    hi: int,
    angle_rule: str,
) -> npt.NDArray[np.complex128]:
    dz = spec.total_length_m / n
    offset = 0.5 if angle_rule == "midpoint" else 0.0
    theta = spec.profile.spin_angle((np.arange(lo, hi, dtype=np.float64) + offset) * dz)
    c, s = np.cos(theta), np.sin(theta)
    ep = complex(math.cos(0.5 * spec.delta_rad_per_m * dz), math.sin(0.5 * spec.delta_rad_per_m * dz))
    em = ep.conjugate()
    m = np.empty((hi - lo, 2, 2), dtype=np.complex128)
    m[:, 0, 0] = ep * c * c + em * s * s
    m[:, 0, 1] = (ep - em) * c * s
    m[:, 1, 0] = m[:, 0, 1]
    m[:, 1, 1] = ep * s * s + em * c * c
    return m


def _ordered_product(m: npt.NDArray[np.complex128]) -> JonesMatrix:
    # pairwise tree, preserving operator order: result = m[-1] ... m[1] m[0]
    while len(m) > 1:
        half = len(m) // 2
        paired = np.matmul(m[1 : 2 * half : 2], m[0 : 2 * half : 2])
        m = np.concatenate([paired, m[-1:]]) if len(m) % 2 else paired
    return m[0]


def _check_grid(spec: SpunMediumSpec, grid: PropagationGrid) -> None:
    if abs(grid.total_length_m - spec.total_length_m) > 1e-12 * spec.total_length_m:
        raise ValueError("grid does not cover the medium length")


def total_matrix(
    spec: SpunMediumSpec,
    grid: PropagationGrid,
    angle_rule: Literal["left", "midpoint"] = "left",
) -> JonesMatrix:
    """Ordered product of all segment matrices over the grid."""
    _check_grid(spec, grid)
    n = grid.n_segments
    out = np.eye(2, dtype=np.complex128)
    done = 0
    while done < n:
        take = min(_CHUNK, n - done)
        out = _ordered_product(_segment_block(spec, n, done, done + take, angle_rule)) @ out
        done += take
    return out


@dataclass(frozen=True)
class EllipticityTrajectory:
    """Sampled ellipticity magnitude along the fiber.

    epsilon holds |minor/major| per sample; gap markers (NaN) appear only
    where the axis-ratio formula is undefined. settle_z_m carries the
    post-transition boundary so metric windows can default correctly.
    """

    z_m: npt.NDArray[np.float64]
    epsilon: npt.NDArray[np.float64]
    metric_kind: MetricKind
    settle_z_m: float

    def __post_init__(self):
        if len(self.z_m) != len(self.epsilon):
            raise ValueError("z and epsilon lengths differ")
        if np.any(np.diff(self.z_m) <= 0.0):
            raise ValueError("z samples must strictly increase")

    @property
    def delta_eps_pp(self) -> float:
        """Whole-trajectory peak-to-peak fluctuation."""
        return float(np.nanmax(self.epsilon) - np.nanmin(self.epsilon))

    @property
    def rms_eps(self) -> float:
        """Whole-trajectory RMS deviation from the mean."""
        return stability_metrics(self, window=(float(self.z_m[0]), float(self.z_m[-1]))).rms_eps

    @property
    def peak_eps(self) -> float:
        return float(np.nanmax(self.epsilon))


def _eps_from_states(states: npt.NDArray[np.complex128], metric_kind: MetricKind):
    ex = states[..., 0]
    ey = states[..., 1]
    if metric_kind == "axis_ratio":
        ax = np.abs(ex)
        out = np.full(ax.shape, np.nan)
        ok = ax >= 1e-300
        out[ok] = np.abs(ey[ok]) / ax[ok]
        return out
    s0 = np.abs(ex) ** 2 + np.abs(ey) ** 2
    s3 = -2.0 * (ex * np.conj(ey)).imag
    return np.abs(np.tan(0.5 * np.arcsin(np.clip(s3 / s0, -1.0, 1.0))))


def propagate_trajectory(
    spec: SpunMediumSpec,
    grid: PropagationGrid,
    e_in: JonesVector | None = None,
    metric_kind: MetricKind = "principal",
    angle_rule: Literal["left", "midpoint"] = "left",
) -> EllipticityTrajectory:
    """State scan over the grid, recording ellipticity at every position.

    The final state always matches apply(total_matrix(spec, grid), e_in)
    since the scan reuses the same segment blocks in the same order.
    """
    _check_grid(spec, grid)
    if e_in is None:
        e_in = jones_vector(1.0, 0.0)
    n = grid.n_segments
    eps = np.empty(n + 1, dtype=np.float64)
    eps[0] = _eps_from_states(np.asarray(e_in, dtype=np.complex128)[None, :], metric_kind)[0]
    prefix = np.eye(2, dtype=np.complex128)
    state0 = np.asarray(e_in, dtype=np.complex128)
    done = 0
    while done < n:
        take = min(_CHUNK, n - done)
        m = _segment_block(spec, n, done, done + take, angle_rule)
        # in-place inclusive prefix products within the chunk
        shift = 1
        while shift < take:
            m[shift:] = m[shift:] @ m[:-shift]
            shift *= 2
        states = m @ (prefix @ state0)
        eps[done + 1 : done + take + 1] = _eps_from_states(states, metric_kind)
        prefix = m[-1] @ prefix
        done += take
    return EllipticityTrajectory(
        z_m=grid.z_samples(),
        epsilon=eps,
        metric_kind=metric_kind,
        settle_z_m=min(spec.settle_z_m, spec.total_length_m),
    )


@dataclass(frozen=True)
class StabilityMetrics:
    delta_eps_pp: float
    rms_eps: float
    mean_eps: float


def stability_metrics(
    traj: EllipticityTrajectory,
    window: tuple[float, float] | None = None,
) -> StabilityMetrics:
    """Peak-to-peak, RMS and mean ellipticity over a z window.

    The window defaults to the post-transition span, where the residual
    ripple is the quantity of interest. Pass an explicit window to measure
    the whole trajectory instead.
    """
    if window is None:
        window = (traj.settle_z_m, float(traj.z_m[-1]))
    lo, hi = window
    mask = (traj.z_m >= lo - 1e-12) & (traj.z_m <= hi + 1e-12)
    z = traj.z_m[mask]
    e = traj.epsilon[mask]
    keep = ~np.isnan(e)
    z, e = z[keep], e[keep]
    if len(e) < 2:
        raise EmptyWindowError(f"window {window!r} holds fewer than two samples")
    span = float(z[-1] - z[0])
    mean = float(np.trapezoid(e, z)) / span
    rms = math.sqrt(max(float(np.trapezoid((e - mean) ** 2, z)) / span, 0.0))
    return StabilityMetrics(
        delta_eps_pp=float(e.max() - e.min()),
        rms_eps=rms,
        mean_eps=mean,
    )


def conversion_length(traj: EllipticityTrajectory, threshold: float = 0.95) -> float | None:
    """First z where the ellipticity reaches the threshold, None if never."""
    hits = np.nonzero(traj.epsilon >= threshold)[0]
    if len(hits) == 0:
        return None
    return float(traj.z_m[hits[0]])


def estimate_segments(total_length_m: float, tolerance_eps: float) -> int:
    """Segment count for a target product error, from N >= C L^2 / eps.

    C was calibrated once against the measured first-order error constant of
    the default medium; the floor keeps degenerate inputs usable.
    """
    if total_length_m <= 0.0:
        raise ValueError("length must be positive")
    if not 0.0 < tolerance_eps < 1.0:
        raise ValueError("tolerance must lie in (0, 1)")
    c = float(constant("segment_calibration_c"))
    return max(64, math.ceil(c * total_length_m**2 / tolerance_eps))


def fluctuation_bound(profile: SpinProfile) -> float:
    """Fluctuation driver max|dxi/dz| * xi_max for analytic profiles.

    A correlation driver, not an absolute bound; the proportionality
    constant is unknown.
    """
    xm = profile.xi_max_rad_per_m
    if profile.kind == "linear":
        return xm * xm / profile.transition_l2_m
    if profile.kind == "cosine":
        return math.pi * xm * xm / (2.0 * profile.transition_l2_m)
    if profile.kind == "constant":
        return 0.0
    raise UnsupportedProfileError("sampled profiles have no analytic rate derivative")
