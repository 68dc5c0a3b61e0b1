"""Optical elements of the reflective current-sensor chain.

The sensor is a single-ended loop: polarizer, 45 degree splice, quarter-wave
plate, sensing coil, mirror, then the same elements in reverse. All element
constructors return plain Jones matrices; the chain assembly lives in
roundtrip_field.

Two conventions matter and are easy to get wrong:

* The Faraday rotation is non-reciprocal. After the mirror the field is
  rotated again in the same lab-frame sense, so the round trip accumulates
  2F. Modeling the return pass as the inverse rotation would cancel the
  effect and leave the detector blind to current.
* The quarter-wave plate of the deviation model is written in its own
  fast-axis frame. In the chain it sits with its axes at 45 degrees to the
  polarizer, which is exactly what turns the nominal plate into the
  circular-basis converter the printed ideal matrices describe. The return
  pass applies the element's complex conjugate, the lab-frame form of
  traversing the same reciprocal retarder after reflection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import constant
from .errors import FringeNullError, RetardationSingularityError
from .jones import (
    IDENTITY,
    JonesMatrix,
    JonesVector,
    intensity,
    jones_vector,
    rotator,
)

SQRT_HALF = math.sqrt(0.5)


def polarizer() -> JonesMatrix:
    """Horizontal linear polarizer, a projector onto x."""
    return np.array([[1, 0], [0, 0]], dtype=np.complex128)


def splice45_in() -> JonesMatrix:
    return SQRT_HALF * np.array([[1, 1], [-1, 1]], dtype=np.complex128)


def splice45_out() -> JonesMatrix:
    """Inverse of the inbound 45 degree splice (its transpose)."""
    return splice45_in().T.copy()


def qwp_ideal_in() -> JonesMatrix:
    return SQRT_HALF * np.array([[1, 1j], [1j, 1]], dtype=np.complex128)


def qwp_ideal_out() -> JonesMatrix:
    return SQRT_HALF * np.array([[1, -1j], [-1j, 1]], dtype=np.complex128)


def faraday_in(f_rad: float) -> JonesMatrix:
    return rotator(f_rad)


def faraday_out(f_rad: float) -> JonesMatrix:
    return rotator(-f_rad)


def mirror() -> JonesMatrix:
    return IDENTITY.copy()


@dataclass(frozen=True)
class ImperfectWaveplate:
    """Fabrication state of a discrete quarter-wave plate.

    rho_rad is the actual retardation, beta_rad the splice (axis alignment)
    error. The optional physical triple records where rho came from; when
    present it must reproduce rho_rad through 2 pi delta_n length / lambda.
    """

    rho_rad: float
    beta_rad: float
    delta_n: float | None = None
    cut_length_m: float | None = None
    wavelength_m: float | None = None

    def __post_init__(self):
        if None not in (self.delta_n, self.cut_length_m, self.wavelength_m):
            implied = 2 * math.pi * self.delta_n * self.cut_length_m / self.wavelength_m
            if abs(implied - self.rho_rad) > 1e-12 * max(1.0, abs(self.rho_rad)):
                raise ValueError(
                    "stored rho_rad disagrees with the physical parameters"
                )

    @classmethod
    def from_physical(
        cls,
        delta_n: float,
        cut_length_m: float,
        wavelength_m: float,
        beta_rad: float = 0.0,
        literal_path_length: bool = False,
    ) -> "ImperfectWaveplate":
        """Build from material and geometry.

        literal_path_length treats rho as the bare path-length difference
        delta_n * d instead of a phase; off by default, kept only for
        comparing against conventions that quote rho that way.
        """
        if literal_path_length:
            rho = delta_n * cut_length_m
            return cls(rho, beta_rad)
        rho = 2 * math.pi * delta_n * cut_length_m / wavelength_m
        return cls(rho, beta_rad, delta_n, cut_length_m, wavelength_m)

    @classmethod
    def from_cut_deviation(
        cls, cut_deviation_m: float, splice_angle_rad: float = 0.0
    ) -> "ImperfectWaveplate":
        """Plate cut short or long of the nominal quarter-wave length.

        Material and wavelength come from the ambient build constants; only
        the two fabrication errors vary.
        """
        dn = float(constant("birefringence_delta_n"))
        lam = float(constant("wavelength_m"))
        return cls.from_physical(
            delta_n=dn,
            cut_length_m=float(constant("plate_cut_length_m")) + cut_deviation_m,
            wavelength_m=lam,
            beta_rad=splice_angle_rad,
        )

    @classmethod
    def nominal(cls) -> "ImperfectWaveplate":
        return cls(math.pi / 2, 0.0)

    def is_nominal(self) -> bool:
        return self.rho_rad == math.pi / 2 and self.beta_rad == 0.0


def qwp_imperfect(w: ImperfectWaveplate) -> JonesMatrix:
    """Deviation-model plate in its own fast-axis frame.

    Built from the sine/cosine form, which is algebraically identical to the
    printed tan form but stays finite at rho = pi.
    """
    c = math.cos(w.rho_rad / 2)
    s = math.sin(w.rho_rad / 2)
    c2b = math.cos(2 * w.beta_rad)
    s2b = math.sin(2 * w.beta_rad)
    return np.array(
        [
            [c + 1j * s * c2b, 1j * s * s2b],
            [1j * s * s2b, c - 1j * s * c2b],
        ],
        dtype=np.complex128,
    )


def qwp_imperfect_tan(w: ImperfectWaveplate) -> JonesMatrix:
    """Literal tan-form construction; singular at rho = pi mod 2 pi."""
    if abs(math.remainder(w.rho_rad - math.pi, 2 * math.pi)) < 1e-9:
        raise RetardationSingularityError(
            f"tan(rho/2) diverges at rho_rad={w.rho_rad!r}"
        )
    c = math.cos(w.rho_rad / 2)
    t = math.tan(w.rho_rad / 2)
    c2b = math.cos(2 * w.beta_rad)
    s2b = math.sin(2 * w.beta_rad)
    return c * np.array(
        [
            [1 + 1j * t * c2b, 1j * t * s2b],
            [1j * t * s2b, 1 - 1j * t * c2b],
        ],
        dtype=np.complex128,
    )


def mount_at_45deg(element: JonesMatrix) -> JonesMatrix:
    """Place a fast-axis-frame element with its axes at 45 degrees."""
    return rotator(math.pi / 4) @ element @ rotator(-math.pi / 4)


@dataclass(frozen=True)
class FaradayCoil:
    """Sensing coil. Either give the rotation directly or the full triple."""

    rotation_angle_f_rad: float
    verdet_rad_per_amp_turn: float | None = None
    turns: int | None = None
    current_a: float | None = None

    def __post_init__(self):
        if None not in (self.verdet_rad_per_amp_turn, self.turns, self.current_a):
            implied = self.verdet_rad_per_amp_turn * self.turns * self.current_a
            if abs(implied - self.rotation_angle_f_rad) > 1e-12 * max(
                1.0, abs(self.rotation_angle_f_rad)
            ):
                raise ValueError("rotation angle disagrees with verdet*turns*current")

    @classmethod
    def from_current(
        cls, verdet_rad_per_amp_turn: float, turns: int, current_a: float
    ) -> "FaradayCoil":
        return cls(
            verdet_rad_per_amp_turn * turns * current_a,
            verdet_rad_per_amp_turn,
            turns,
            current_a,
        )


@dataclass(frozen=True)
class IntensityResult:
    i_out: float
    i_ideal: float
    relative_error_pct: float


@dataclass(frozen=True)
class FocsScenario:
    """One round trip: coil state plus the converter stage to use.

    waveplate None means the ideal printed pair. A front-end matrix pair may
    be injected directly (forward, return) to model spun-fiber converters;
    see the experiments module.
    """

    coil: FaradayCoil
    waveplate: ImperfectWaveplate | None = None
    converter_override: tuple[JonesMatrix, JonesMatrix] | None = None

    def converter_pair(self) -> tuple[JonesMatrix, JonesMatrix]:
        if self.converter_override is not None:
            return self.converter_override
        if self.waveplate is None or self.waveplate.is_nominal():
            return qwp_ideal_in(), qwp_ideal_out()
        fwd = mount_at_45deg(qwp_imperfect(self.waveplate))
        return fwd, np.conj(fwd)


def roundtrip_field(s: FocsScenario, e_in: JonesVector | None = None) -> JonesVector:
    """Field at the detector after the full reflective pass."""
    if e_in is None:
        e_in = jones_vector(1.0, 0.0)
    f = s.coil.rotation_angle_f_rad
    q_in, q_out = s.converter_pair()
    pol = polarizer()
    chain = (
        pol
        @ splice45_out()
        @ q_out
        @ rotator(f)   # non-reciprocal: same sense as the inbound pass
        @ mirror()
        @ rotator(f)
        @ q_in
        @ splice45_in()
        @ pol
    )
    return chain @ e_in


def ideal_intensity(f_rad: float) -> float:
    """Closed form for the nominal chain at unit input, (1 + cos 4F) / 2."""
    return 0.5 * (1.0 + math.cos(4 * f_rad))


def detected_intensity(s: FocsScenario, e_in: JonesVector | None = None) -> IntensityResult:
    ideal_scenario = FocsScenario(coil=s.coil)
    i_ideal = intensity(roundtrip_field(ideal_scenario, e_in))
    if i_ideal < 1e-15:
        raise FringeNullError(
            f"ideal fringe vanishes at F={s.coil.rotation_angle_f_rad!r} rad"
        )
    i_out = intensity(roundtrip_field(s, e_in))
    return IntensityResult(
        i_out=i_out,
        i_ideal=i_ideal,
        relative_error_pct=(i_out - i_ideal) / i_ideal * 100.0,
    )
