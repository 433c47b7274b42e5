"""Resistive pin displacement sensing and tactile shape recognition.

Every pin carries a linear-taper potentiometer read over a voltage
divider. Resistance falls linearly from its maximum at full pin extension
to its minimum at full retraction, but the usable electrical window covers
only the upper portion of the mechanical travel: a pin must retract past
the mount offset before the wiper enters the track. Heights are recovered
by inverting each pin's own calibration line; readings outside the window
clamp to its edges, which is also how non-contacting (dangling) pins
appear in the data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .gripper import GripperConfig, GripperState, Pose, adapt, new_gripper
from .terrain import Heightfield

# Readings clip to the physically plausible track range: wiper overshoot
# past either window end saturates a little beyond the trimmed endpoints.
OVERSHOOT_BELOW_WINDOW = 0.25  # fraction of span beyond r_max (pin over-extended)
OVERSHOOT_ABOVE_WINDOW = 0.10  # fraction of span beyond r_min (pin over-retracted)


@dataclass(frozen=True)
class SensorCalibration:
    """Per-pin potentiometer endpoints and read noise, row-major (k outer).

    ``r_max_ohm``/``r_min_ohm`` are the track resistances at the electrical
    window's extended and retracted ends; the window spans tip heights
    ``[height_offset_mm, height_offset_mm + stroke_mm]``. ``sigma_mm`` is
    each channel's read noise expressed as equivalent tip height;
    electrically it enters as a resistance jitter of ``sigma_mm * slope``.
    """

    r_max_ohm: np.ndarray
    r_min_ohm: np.ndarray
    sigma_mm: np.ndarray
    stroke_mm: float = 20.0
    height_offset_mm: float = 16.0

    def __post_init__(self):
        for name in ("r_max_ohm", "r_min_ohm", "sigma_mm"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if arr.ndim != 1 or arr.size == 0 or not np.all(np.isfinite(arr)):
                raise ConfigError(f"{name} must be a finite 1-d array")
        if not (self.r_max_ohm.size == self.r_min_ohm.size == self.sigma_mm.size):
            raise ConfigError("calibration arrays must have equal length")
        if np.any(self.r_min_ohm <= 0) or np.any(self.r_max_ohm <= self.r_min_ohm):
            raise ConfigError("require 0 < r_min < r_max per pin")
        if np.any(self.sigma_mm < 0):
            raise ConfigError("sigma_mm must be non-negative")
        if self.stroke_mm <= 0 or self.height_offset_mm < 0:
            raise ConfigError("stroke_mm must be positive and height_offset_mm non-negative")

    @property
    def n_pins(self) -> int:
        return int(self.r_max_ohm.size)

    @property
    def window_mm(self) -> tuple[float, float]:
        return self.height_offset_mm, self.height_offset_mm + self.stroke_mm


def calibrate_bank(
    n_pins: int,
    rng: np.random.Generator,
    nominal_r_max_ohm: float = 10_000.0,
    nominal_r_min_ohm: float = 1_000.0,
    endpoint_spread: float = 0.15,
    sigma_floor_mm: float = 0.16,
    sigma_span_mm: float = 6.53,
    sigma_beta_a: float = 3.0,
    sigma_beta_b: float = 2.03,
    stroke_mm: float = 20.0,
    height_offset_mm: float = 16.0,
) -> SensorCalibration:
    """Draw a manufacturing spread of potentiometer endpoints and noise.

    Endpoints vary uniformly within +/-``endpoint_spread`` of nominal;
    channel noise follows a scaled beta, so a bank holds a few very clean
    and a few rattly channels around a mid-level bulk.
    """
    if n_pins < 1:
        raise ConfigError(f"n_pins must be >= 1, got {n_pins}")
    r_max = nominal_r_max_ohm * rng.uniform(1 - endpoint_spread, 1 + endpoint_spread, n_pins)
    r_min = nominal_r_min_ohm * rng.uniform(1 - endpoint_spread, 1 + endpoint_spread, n_pins)
    sigma = sigma_floor_mm + sigma_span_mm * rng.beta(sigma_beta_a, sigma_beta_b, n_pins)
    return SensorCalibration(
        r_max_ohm=r_max,
        r_min_ohm=r_min,
        sigma_mm=sigma,
        stroke_mm=stroke_mm,
        height_offset_mm=height_offset_mm,
    )


def _check_pin_index(calibration: SensorCalibration, pin_index: int) -> None:
    if not 0 <= pin_index < calibration.n_pins:
        raise ConfigError(f"pin_index {pin_index} outside calibration bank")


def forward_resistance(
    calibration: SensorCalibration,
    pin_index: int,
    tip_height_mm: float,
    rng: np.random.Generator | None = None,
) -> float:
    """Resistance in ohms read from one pin at the given tip height.

    The calibration line maps the electrical window linearly from r_max
    (extended end) down to r_min (retracted end) and extrapolates beyond
    it; noise, when an rng is supplied, perturbs the reading, and the
    result saturates at the physical ends of the track.
    """
    _check_pin_index(calibration, pin_index)
    lo, hi = calibration.window_mm
    r_max = float(calibration.r_max_ohm[pin_index])
    r_min = float(calibration.r_min_ohm[pin_index])
    slope = (r_min - r_max) / (hi - lo)  # ohms per mm of retraction
    r = r_max + slope * (tip_height_mm - lo)
    if rng is not None:
        r += float(calibration.sigma_mm[pin_index]) * slope * rng.normal()
    span = r_max - r_min
    return float(
        np.clip(r, r_min - OVERSHOOT_ABOVE_WINDOW * span, r_max + OVERSHOOT_BELOW_WINDOW * span)
    )


def invert_height(
    calibration: SensorCalibration,
    pin_index: int,
    resistance_ohm: float,
) -> tuple[float, bool]:
    """Recover tip height from a resistance reading.

    Returns ``(height_mm, in_range)``. Heights clamp onto the electrical
    window; ``in_range`` is False when the raw reading fell outside the
    track endpoints, so the clamp actually bound.
    """
    _check_pin_index(calibration, pin_index)
    lo, hi = calibration.window_mm
    r_max = float(calibration.r_max_ohm[pin_index])
    r_min = float(calibration.r_min_ohm[pin_index])
    h = calibration.stroke_mm * (resistance_ohm - r_max) / (r_min - r_max) + lo
    in_range = r_min <= resistance_ohm <= r_max
    return float(min(max(h, lo), hi)), bool(in_range)


@dataclass(frozen=True)
class PinReading:
    """One sensed pin: electrical reading plus its inverted height."""

    j: int
    k: int
    resistance_ohm: float
    height_mm: float
    in_range: bool


def read_pins(
    config: GripperConfig,
    state: GripperState,
    calibration: SensorCalibration,
    rng: np.random.Generator | None = None,
) -> list[PinReading]:
    """Read every pin of an adapted gripper once.

    Pass ``rng=None`` for a noiseless read (heights reproduce the adapted
    profile exactly wherever it lies inside the electrical window).
    """
    if calibration.n_pins != config.total_pins:
        raise ConfigError(
            f"calibration bank has {calibration.n_pins} channels, "
            f"gripper has {config.total_pins} pins"
        )
    out = []
    for idx, pin in enumerate(state.pins):
        r = forward_resistance(calibration, idx, pin.tip_height_mm, rng)
        h, ok = invert_height(calibration, idx, r)
        out.append(PinReading(j=pin.j, k=pin.k, resistance_ohm=r, height_mm=h, in_range=ok))
    return out


@dataclass(frozen=True)
class RecognitionResult:
    """Tactile press classification of a terrain block under the array."""

    label: str  # "convex" or "concave"
    score_mm: float  # centre-minus-edge mean height contrast
    mean_heights_mm: np.ndarray  # per pin, row-major (k outer)
    std_heights_mm: np.ndarray
    sigma_bar_mm: float  # mean per-pin sample std
    presses: int


def recognize_shape(
    config: GripperConfig,
    calibration: SensorCalibration,
    terrain: Heightfield,
    presses: int = 10,
    rng: np.random.Generator | None = None,
    pose_x_mm: float = 0.0,
    centre_halfwidth: int = 1,
) -> RecognitionResult:
    """Press the array onto a block and classify it convex or concave.

    Each press lowers the gripper to the depth that brings the tallest
    terrain point to the top of pin travel, adapts, and reads the whole
    bank. Columns within ``centre_halfwidth`` of the middle column are
    averaged against the rest; a taller centre means convex.
    """
    if presses < 1:
        raise ConfigError(f"presses must be >= 1, got {presses}")
    z_press = terrain.z_max - config.travel_mm
    heights = np.empty((presses, config.total_pins))
    for p in range(presses):
        state = adapt(config, new_gripper(config, Pose(pose_x_mm, z_press)), terrain)
        readings = read_pins(config, state, calibration, rng)
        heights[p] = [r.height_mm for r in readings]
    mean_h = heights.mean(axis=0)
    std_h = heights.std(axis=0, ddof=1) if presses > 1 else np.zeros(config.total_pins)
    js = np.array([pin.j for pin in state.pins])
    mid = (1 + config.pins_per_block) / 2.0
    centre = np.abs(js - mid) <= centre_halfwidth
    score = float(mean_h[centre].mean() - mean_h[~centre].mean())
    label = "convex" if score > 0 else "concave"
    return RecognitionResult(
        label=label,
        score_mm=score,
        mean_heights_mm=mean_h,
        std_heights_mm=std_h,
        sigma_bar_mm=float(std_h.mean()),
        presses=presses,
    )
