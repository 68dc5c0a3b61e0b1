"""Scenario configuration: strict parsing and canonical serialization.

Files are JSON. Unknown keys fail with the full key path rather than being
ignored, numeric keys carry their unit as a name suffix, and parsing then
serializing is a fixed point. Every file may carry an assumed-constants
block; values that disagree with this build are rejected, not silently
reinterpreted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .constants import ASSUMED_CONSTANTS, SCHEMA_VERSION, constant
from .errors import ConfigError
from .experiments import (
    FrontEnd,
    front_end_high_order,
    front_end_ideal,
    front_end_imperfect,
    front_end_spun,
)
from .elements import FaradayCoil, ImperfectWaveplate
from .spun import SpinProfile, SpunMediumSpec

_PROFILE_KINDS = ("linear", "cosine", "constant")
_FRONT_END_KINDS = ("ideal", "imperfect_qwp", "spun_fiber", "high_order_qwp")
_METRIC_KINDS = ("principal", "axis_ratio")


def _require_mapping(obj, path: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError("expected an object", path)
    return obj

def _reject_unknown(obj: dict, allowed, path: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigError("unknown key", f"{path}.{key}" if path else key)

def _get_float(obj: dict, key: str, default: float, path: str) -> float:
    v = obj.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError("expected a number", f"{path}.{key}")
    return float(v)

def _get_int(obj: dict, key: str, default: int, path: str) -> int:
    v = obj.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError("expected an integer", f"{path}.{key}")
    return v

def _get_str(obj: dict, key: str, default: str, path: str, choices=None) -> str:
    v = obj.get(key, default)
    if not isinstance(v, str):
        raise ConfigError("expected a string", f"{path}.{key}")
    if choices is not None and v not in choices:
        raise ConfigError(f"must be one of {', '.join(choices)}", f"{path}.{key}")
    return v


@dataclass(frozen=True)
class ProfileConfig:
    kind: str
    xi_over_delta: float
    lead_in_l1_m: float
    transition_l2_m: float

    @classmethod
    def parse(cls, obj, path: str) -> "ProfileConfig":
        obj = _require_mapping(obj, path)
        _reject_unknown(
            obj, ("kind", "xi_over_delta", "lead_in_l1_m", "transition_l2_m"), path
        )
        return cls(
            kind=_get_str(obj, "kind", str(constant("medium_profile")), path, _PROFILE_KINDS),
            xi_over_delta=_get_float(
                obj, "xi_over_delta", float(constant("medium_xi_over_delta")), path
            ),
            lead_in_l1_m=_get_float(
                obj, "lead_in_l1_m", float(constant("medium_lead_in_m")), path
            ),
            transition_l2_m=_get_float(
                obj, "transition_l2_m", float(constant("medium_transition_m")), path
            ),
        )

    def to_obj(self) -> dict:
        return {
            "kind": self.kind,
            "xi_over_delta": self.xi_over_delta,
            "lead_in_l1_m": self.lead_in_l1_m,
            "transition_l2_m": self.transition_l2_m,
        }

    def build(self, delta_rad_per_m: float) -> SpinProfile:
        return SpinProfile(
            kind=self.kind,
            xi_max_rad_per_m=self.xi_over_delta * delta_rad_per_m,
            lead_in_l1_m=self.lead_in_l1_m,
            transition_l2_m=self.transition_l2_m,
        )


@dataclass(frozen=True)
class MediumConfig:
    total_length_m: float
    beat_length_m: float
    profile: ProfileConfig

    @classmethod
    def parse(cls, obj, path: str, defaults: "MediumConfig") -> "MediumConfig":
        obj = _require_mapping(obj, path)
        _reject_unknown(obj, ("total_length_m", "beat_length_m", "profile"), path)
        profile = (
            ProfileConfig.parse(obj["profile"], f"{path}.profile")
            if "profile" in obj
            else defaults.profile
        )
        return cls(
            total_length_m=_get_float(obj, "total_length_m", defaults.total_length_m, path),
            beat_length_m=_get_float(obj, "beat_length_m", defaults.beat_length_m, path),
            profile=profile,
        )

    def to_obj(self) -> dict:
        return {
            "total_length_m": self.total_length_m,
            "beat_length_m": self.beat_length_m,
            "profile": self.profile.to_obj(),
        }

    def build(self) -> SpunMediumSpec:
        delta = 2.0 * math.pi / self.beat_length_m
        return SpunMediumSpec(
            total_length_m=self.total_length_m,
            delta_rad_per_m=delta,
            profile=self.profile.build(delta),
        )


def default_medium_config() -> MediumConfig:
    return MediumConfig(
        total_length_m=float(constant("medium_total_length_m")),
        beat_length_m=float(constant("medium_beat_length_m")),
        profile=ProfileConfig(
            kind=str(constant("medium_profile")),
            xi_over_delta=float(constant("medium_xi_over_delta")),
            lead_in_l1_m=float(constant("medium_lead_in_m")),
            transition_l2_m=float(constant("medium_transition_m")),
        ),
    )


def _device_beat_length_m() -> float:
    return float(constant("wavelength_m")) / float(constant("birefringence_delta_n"))


def default_front_end_medium(kind: str) -> MediumConfig:
    if kind == "high_order_qwp":
        return MediumConfig(
            total_length_m=float(constant("ho_qwp_total_length_m")),
            beat_length_m=_device_beat_length_m(),
            profile=ProfileConfig(
                kind="cosine",
                xi_over_delta=float(constant("ho_qwp_xi_over_delta")),
                lead_in_l1_m=0.0,
                transition_l2_m=float(constant("ho_qwp_transition_m")),
            ),
        )
    return MediumConfig(
        total_length_m=float(constant("spun_fiber_total_length_m")),
        beat_length_m=_device_beat_length_m(),
        profile=ProfileConfig(
            kind="constant",
            xi_over_delta=float(constant("spun_fiber_xi_over_delta")),
            lead_in_l1_m=0.0,
            transition_l2_m=0.0,
        ),
    )


@dataclass(frozen=True)
class FrontEndConfig:
    kind: str
    cut_deviation_m: float = 0.0
    splice_angle_rad: float = 0.0
    medium: MediumConfig | None = None
    n_segments: int = 0

    @classmethod
    def parse(cls, obj, path: str) -> "FrontEndConfig":
        obj = _require_mapping(obj, path)
        kind = _get_str(obj, "kind", "ideal", path, _FRONT_END_KINDS)
        if kind == "ideal":
            _reject_unknown(obj, ("kind",), path)
            return cls(kind=kind)
        if kind == "imperfect_qwp":
            _reject_unknown(obj, ("kind", "cut_deviation_m", "splice_angle_rad"), path)
            return cls(
                kind=kind,
                cut_deviation_m=_get_float(obj, "cut_deviation_m", 0.0, path),
                splice_angle_rad=_get_float(obj, "splice_angle_rad", 0.0, path),
            )
        _reject_unknown(obj, ("kind", "medium", "n_segments"), path)
        med_default = default_front_end_medium(kind)
        medium = (
            MediumConfig.parse(obj["medium"], f"{path}.medium", med_default)
            if "medium" in obj
            else med_default
        )
        return cls(
            kind=kind,
            medium=medium,
            n_segments=_get_int(
                obj, "n_segments", int(constant("front_end_segments")), path
            ),
        )

    def to_obj(self) -> dict:
        if self.kind == "ideal":
            return {"kind": self.kind}
        if self.kind == "imperfect_qwp":
            return {
                "kind": self.kind,
                "cut_deviation_m": self.cut_deviation_m,
                "splice_angle_rad": self.splice_angle_rad,
            }
        return {
            "kind": self.kind,
            "medium": self.medium.to_obj(),
            "n_segments": self.n_segments,
        }

    def build(self) -> FrontEnd:
        if self.kind == "ideal":
            return front_end_ideal()
        if self.kind == "imperfect_qwp":
            plate = ImperfectWaveplate.from_cut_deviation(
                cut_deviation_m=self.cut_deviation_m,
                splice_angle_rad=self.splice_angle_rad,
            )
            return front_end_imperfect(plate)
        medium = self.medium.build()
        if self.kind == "spun_fiber":
            return front_end_spun(medium, self.n_segments)
        return front_end_high_order(medium, self.n_segments)


@dataclass(frozen=True)
class CoilConfig:
    verdet_rad_per_amp_turn: float
    turns: int
    current_a: float

    @classmethod
    def parse(cls, obj, path: str) -> "CoilConfig":
        obj = _require_mapping(obj, path)
        _reject_unknown(obj, ("verdet_rad_per_amp_turn", "turns", "current_a"), path)
        return cls(
            verdet_rad_per_amp_turn=_get_float(
                obj,
                "verdet_rad_per_amp_turn",
                float(constant("verdet_rad_per_amp_turn")),
                path,
            ),
            turns=_get_int(obj, "turns", int(constant("coil_turns")), path),
            current_a=_get_float(obj, "current_a", 1000.0, path),
        )

    def to_obj(self) -> dict:
        return {
            "verdet_rad_per_amp_turn": self.verdet_rad_per_amp_turn,
            "turns": self.turns,
            "current_a": self.current_a,
        }

    def build(self) -> FaradayCoil:
        return FaradayCoil.from_current(
            verdet_rad_per_amp_turn=self.verdet_rad_per_amp_turn,
            turns=self.turns,
            current_a=self.current_a,
        )


@dataclass(frozen=True)
class TrajectoryConfig:
    n_segments: int
    metric_kind: str
    stride: int

    @classmethod
    def parse(cls, obj, path: str) -> "TrajectoryConfig":
        obj = _require_mapping(obj, path)
        _reject_unknown(obj, ("n_segments", "metric_kind", "stride"), path)
        out = cls(
            n_segments=_get_int(obj, "n_segments", int(constant("sweep_segments")), path),
            metric_kind=_get_str(obj, "metric_kind", "principal", path, _METRIC_KINDS),
            stride=_get_int(obj, "stride", 1000, path),
        )
        if out.stride < 1:
            raise ConfigError("stride must be at least 1", f"{path}.stride")
        return out

    def to_obj(self) -> dict:
        return {
            "n_segments": self.n_segments,
            "metric_kind": self.metric_kind,
            "stride": self.stride,
        }


@dataclass(frozen=True)
class CurrentSweepConfig:
    max_a: float
    points: int

    @classmethod
    def parse(cls, obj, path: str) -> "CurrentSweepConfig":
        obj = _require_mapping(obj, path)
        _reject_unknown(obj, ("max_a", "points"), path)
        out = cls(
            max_a=_get_float(obj, "max_a", float(constant("current_max_a")), path),
            points=_get_int(obj, "points", int(constant("current_points")), path),
        )
        if out.points < 2:
            raise ConfigError("need at least two points", f"{path}.points")
        return out

    def to_obj(self) -> dict:
        return {"max_a": self.max_a, "points": self.points}


@dataclass(frozen=True)
class XiSweepConfig:
    ratios: tuple[float, ...]
    profiles: tuple[str, ...]
    n_segments: int

    @classmethod
    def parse(cls, obj, path: str) -> "XiSweepConfig":
        obj = _require_mapping(obj, path)
        _reject_unknown(obj, ("ratios", "profiles", "n_segments"), path)
        ratios = obj.get("ratios", [1.0, 3.0, 5.0, 10.0])
        if not isinstance(ratios, list) or not ratios or any(
            isinstance(r, bool) or not isinstance(r, (int, float)) for r in ratios
        ):
            raise ConfigError("expected a non-empty list of numbers", f"{path}.ratios")
        profiles = obj.get("profiles", ["linear", "cosine"])
        if not isinstance(profiles, list) or not profiles or any(
            not isinstance(p, str) or p not in _PROFILE_KINDS for p in profiles
        ):
            raise ConfigError(
                f"expected a non-empty list from {', '.join(_PROFILE_KINDS)}",
                f"{path}.profiles",
            )
        return cls(
            ratios=tuple(float(r) for r in ratios),
            profiles=tuple(profiles),
            n_segments=_get_int(obj, "n_segments", int(constant("sweep_segments")), path),
        )

    def to_obj(self) -> dict:
        return {
            "ratios": list(self.ratios),
            "profiles": list(self.profiles),
            "n_segments": self.n_segments,
        }


@dataclass(frozen=True)
class PerturbationConfig:
    wavelength_drift_m: float
    temperature_excursion_c: float
    n_segments: int

    @classmethod
    def parse(cls, obj, path: str) -> "PerturbationConfig":
        obj = _require_mapping(obj, path)
        _reject_unknown(
            obj, ("wavelength_drift_m", "temperature_excursion_c", "n_segments"), path
        )
        return cls(
            wavelength_drift_m=_get_float(
                obj, "wavelength_drift_m", float(constant("wavelength_drift_m")), path
            ),
            temperature_excursion_c=_get_float(
                obj,
                "temperature_excursion_c",
                float(constant("temperature_excursion_c")),
                path,
            ),
            n_segments=_get_int(obj, "n_segments", int(constant("sweep_segments")), path),
        )

    def to_obj(self) -> dict:
        return {
            "wavelength_drift_m": self.wavelength_drift_m,
            "temperature_excursion_c": self.temperature_excursion_c,
            "n_segments": self.n_segments,
        }


@dataclass(frozen=True)
class ConvergenceConfig:
    segment_counts: tuple[int, ...]
    reference_n: int

    @classmethod
    def parse(cls, obj, path: str) -> "ConvergenceConfig":
        obj = _require_mapping(obj, path)
        _reject_unknown(obj, ("segment_counts", "reference_n"), path)
        counts = obj.get("segment_counts", [16384, 32768, 65536, 131072])
        if not isinstance(counts, list) or not counts or any(
            isinstance(c, bool) or not isinstance(c, int) or c < 1 for c in counts
        ):
            raise ConfigError(
                "expected a non-empty list of positive integers", f"{path}.segment_counts"
            )
        out = cls(
            segment_counts=tuple(counts),
            reference_n=_get_int(obj, "reference_n", 1 << 20, path),
        )
        if any(c >= out.reference_n for c in out.segment_counts):
            raise ConfigError(
                "reference_n must exceed every probe count", f"{path}.reference_n"
            )
        return out

    def to_obj(self) -> dict:
        return {
            "segment_counts": list(self.segment_counts),
            "reference_n": self.reference_n,
        }


@dataclass(frozen=True)
class AppConfig:
    schema_version: str
    front_end: FrontEndConfig
    coil: CoilConfig
    medium: MediumConfig
    trajectory: TrajectoryConfig
    current_sweep: CurrentSweepConfig
    xi_sweep: XiSweepConfig
    perturbation: PerturbationConfig
    convergence: ConvergenceConfig


_TOP_KEYS = (
    "schema_version",
    "front_end",
    "coil",
    "medium",
    "trajectory",
    "current_sweep",
    "xi_sweep",
    "perturbation",
    "convergence",
    "constants",
)


def _check_constants_block(obj, path: str) -> None:
    obj = _require_mapping(obj, path)
    for name, entry in obj.items():
        if name not in ASSUMED_CONSTANTS:
            raise ConfigError("not an assumed constant of this build", f"{path}.{name}")
        entry = _require_mapping(entry, f"{path}.{name}")
        _reject_unknown(entry, ("value", "source"), f"{path}.{name}")
        value, source = ASSUMED_CONSTANTS[name]
        if "value" in entry and entry["value"] != value:
            raise ConfigError(
                f"value {entry['value']!r} disagrees with this build ({value!r})",
                f"{path}.{name}.value",
            )
        if "source" in entry and entry["source"] != source:
            raise ConfigError(
                f"source tag disagrees with this build ({source!r})",
                f"{path}.{name}.source",
            )


def parse_config(obj: object) -> AppConfig:
    obj = _require_mapping(obj, "")
    _reject_unknown(obj, _TOP_KEYS, "")
    version = _get_str(obj, "schema_version", SCHEMA_VERSION, "")
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema version {version!r}, this build reads {SCHEMA_VERSION!r}",
            "schema_version",
        )
    if "constants" in obj:
        _check_constants_block(obj["constants"], "constants")
    return AppConfig(
        schema_version=version,
        front_end=FrontEndConfig.parse(obj.get("front_end", {}), "front_end"),
        coil=CoilConfig.parse(obj.get("coil", {}), "coil"),
        medium=MediumConfig.parse(
            obj.get("medium", {}), "medium", default_medium_config()
        ),
        trajectory=TrajectoryConfig.parse(obj.get("trajectory", {}), "trajectory"),
        current_sweep=CurrentSweepConfig.parse(
            obj.get("current_sweep", {}), "current_sweep"
        ),
        xi_sweep=XiSweepConfig.parse(obj.get("xi_sweep", {}), "xi_sweep"),
        perturbation=PerturbationConfig.parse(
            obj.get("perturbation", {}), "perturbation"
        ),
        convergence=ConvergenceConfig.parse(obj.get("convergence", {}), "convergence"),
    )


def load_config(path: str) -> AppConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_config(obj)


def default_config() -> AppConfig:
    return parse_config({})


def serialize_config(cfg: AppConfig) -> str:
    obj = {
        "schema_version": cfg.schema_version,
        "front_end": cfg.front_end.to_obj(),
        "coil": cfg.coil.to_obj(),
        "medium": cfg.medium.to_obj(),
        "trajectory": cfg.trajectory.to_obj(),
        "current_sweep": cfg.current_sweep.to_obj(),
        "xi_sweep": cfg.xi_sweep.to_obj(),
        "perturbation": cfg.perturbation.to_obj(),
        "convergence": cfg.convergence.to_obj(),
        "constants": {
            name: {"value": value, "source": source}
            for name, (value, source) in sorted(ASSUMED_CONSTANTS.items())
        },
    }
    return json.dumps(obj, indent=1) + "\n"
