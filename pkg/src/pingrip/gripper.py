"""Pin-array gripper: geometry, per-pin state, and the grip phase machine.

The gripper carries a rectangular array of spring-loaded pins (rows along
the depth axis, columns along the slide axis). Pressing the gripper onto
terrain lets every pin conform to the local elevation (adapt). A movable
holder then slides each pin's front half along +x and its back half
effectively along -x; spine tips that meet a rising terrain face within the
slide travel deflect their elastic element and hook the face (lock).
Releasing resets the slide.

All phase functions are pure: they return new state objects and leave their
inputs untouched, so trials can run concurrently from per-trial generators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from .errors import ConfigError, OutsideFootprintError, PhaseError, SimulationError
from .terrain import AsperityModel, Heightfield, sample_asperity

Phase = Literal["approach", "adapt", "lock"]

_FACE_EPS_MM = 1e-6  # terrain must rise above the tip by this much to count as a face
_RISE_EPS_MM = 1e-9  # minimum per-step climb that still counts as "rising"


@dataclass(frozen=True)
class Pose:
    """Gripper pose: x position of the array datum and z of the fully
    extended tip plane. Pin rows are fixed in y."""

    x_mm: float
    z_mm: float


@dataclass(frozen=True)
class GripperConfig:
    """Geometry, elastic constants, and engagement behaviour of the array.

    Pins are indexed by column ``j`` (1..pins_per_block, along x) and row
    ``k`` (1..blocks, along y). A pin's tip height is measured upward from
    the fully extended tip plane; the sensing window sits ``height_offset_mm``
    above that plane and spans ``stroke_mm``.
    """

    blocks: int = 3
    pins_per_block: int = 7
    x_pitch_mm: float = 14.0
    y_pitch_mm: float = 17.4
    stroke_mm: float = 20.0
    height_offset_mm: float = 16.0
    holder_slide_mm: float = 6.0
    pin_width_mm: float = 6.0
    min_bite_mm: float = 3.0
    engage_floor_prob: float = 0.3
    march_step_mm: float = 0.1
    elastic_modulus_pa: float = 2.4e9
    second_moment_m4: float = 8.0e-14
    spine_lever_m: float = 0.02

    def __post_init__(self) -> None:
        if self.blocks < 1 or self.pins_per_block < 1:
            raise ConfigError("pin array needs at least one block and one pin per block")
        for name in (
            "x_pitch_mm",
            "y_pitch_mm",
            "stroke_mm",
            "height_offset_mm",
            "holder_slide_mm",
            "pin_width_mm",
            "march_step_mm",
            "elastic_modulus_pa",
            "second_moment_m4",
            "spine_lever_m",
        ):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.0 <= self.engage_floor_prob <= 1.0:
            raise ConfigError("engage_floor_prob must lie in [0, 1]")
        if self.min_bite_mm < 0 or self.min_bite_mm > self.holder_slide_mm:
            raise ConfigError("min_bite_mm must lie in [0, holder_slide_mm]")

    @property
    def total_pins(self) -> int:
        return self.blocks * self.pins_per_block

    @property
    def travel_mm(self) -> float:
        """Full tip travel: sensing stroke plus the offset below the window."""
        return self.stroke_mm + self.height_offset_mm

    def engage_probability(self, face_extent_mm: float) -> float:
        """Chance that a spine pressed into a face actually seats on it.

        Faces whose horizontal extent reaches the pin width always engage;
        the probability falls linearly to the floor as the extent vanishes,
        which models the sparse, alignment-dependent contact on vertical
        faces.
        """
        if face_extent_mm >= self.pin_width_mm:
            return 1.0
        frac = max(face_extent_mm, 0.0) / self.pin_width_mm
        return self.engage_floor_prob + (1.0 - self.engage_floor_prob) * frac


def pin_world_xy(config: GripperConfig, pose: Pose, j: int, k: int) -> tuple[float, float]:
    """World (x, y) of pin column j, row k for the given pose."""
    if not 1 <= j <= config.pins_per_block or not 1 <= k <= config.blocks:
        raise ConfigError(f"pin index out of range: j={j}, k={k}")
    return pose.x_mm + j * config.x_pitch_mm, k * config.y_pitch_mm


@dataclass(frozen=True)
class PinState:
    """One pin after the most recent phase transition.

    Gaps are the horizontal clearances from the spine tip to the nearest
    rising face along the half's slide direction, capped at the holder
    slide; the deltas are the resulting elastic deflections.
    """

    j: int
    k: int
    tip_height_mm: float = 0.0
    in_contact: bool = False
    front_gap_mm: float = 0.0
    back_gap_mm: float = 0.0
    front_delta_mm: float = 0.0
    back_delta_mm: float = 0.0
    locked: bool = False

    @property
    def deflection_delta_mm(self) -> float:
        return max(self.front_delta_mm, self.back_delta_mm)


@dataclass(frozen=True)
class SpineContact:
    """A spine half that seated on a terrain face during locking."""

    j: int
    k: int
    half: Literal["front", "back"]
    delta_mm: float
    asperity_angle_deg: float
    face_extent_mm: float
    face_angle_deg: float


@dataclass(frozen=True)
class GripperState:
    pose: Pose
    pins: tuple[PinState, ...]
    phase: Phase = "approach"
    holder_slide_mm: float = 0.0
    contacts: tuple[SpineContact, ...] = ()


def new_gripper(config: GripperConfig, pose: Pose) -> GripperState:
    """Fresh approach-phase state with every pin fully extended."""
    pins = tuple(
        PinState(j=j, k=k)
        for k in range(1, config.blocks + 1)
        for j in range(1, config.pins_per_block + 1)
    )
    return GripperState(pose=pose, pins=pins)


def adapt(config: GripperConfig, state: GripperState, terrain: Heightfield) -> GripperState:
    """Press the array onto the terrain so each pin conforms to the surface.

    Pins whose column lands over terrain lower than the extended tip plane
    stay fully extended and out of contact. A press deep enough to bottom a
    pin out is a contract violation: depth policies must keep the tallest
    local feature within the pin travel.
    """
    if state.phase != "approach":
        raise PhaseError(f"adapt requires approach phase, state is in {state.phase!r}")
    xs = np.array([pin_world_xy(config, state.pose, p.j, p.k)[0] for p in state.pins])
    ys = np.array([pin_world_xy(config, state.pose, p.j, p.k)[1] for p in state.pins])
    inside = np.atleast_1d(terrain.contains(xs, ys))
    if not inside.all():
        bad = [(p.j, p.k) for p, ok in zip(state.pins, inside) if not ok]
        raise OutsideFootprintError(
            f"pins {bad} fall outside the terrain footprint at pose x={state.pose.x_mm}"
        )
    elevations = np.atleast_1d(terrain.sample(xs, ys))
    required = elevations - state.pose.z_mm
    if np.any(required > config.travel_mm + 1e-9):
        raise SimulationError(
            f"press at z={state.pose.z_mm} exceeds pin travel "
            f"{config.travel_mm} mm (needed {required.max():.3f} mm)"
        )
    pins = tuple(
        replace(
            pin,
            tip_height_mm=float(req) if req >= 0.0 else 0.0,
            in_contact=bool(req >= 0.0),
            front_gap_mm=0.0,
            back_gap_mm=0.0,
            front_delta_mm=0.0,
            back_delta_mm=0.0,
            locked=False,
        )
        for pin, req in zip(state.pins, required)
    )
    return replace(state, pins=pins, phase="adapt", holder_slide_mm=0.0, contacts=())


def find_face_gap(
    terrain: Heightfield,
    x0: float,
    y0: float,
    z0: float,
    ux: float,
    uy: float,
    step_mm: float,
    reach_mm: float,
) -> float:
    """Distance along (ux, uy) to the first terrain sample rising above z0.

    Returns inf when no face rises within reach (or the footprint ends
    first). The march starts one step out, so a tip resting on a slope sees
    the face at one step's distance.
    """
    n = int(math.ceil(reach_mm / step_mm))
    s = step_mm * np.arange(1, n + 1)
    xs = x0 + ux * s
    ys = y0 + uy * s
    inside = np.atleast_1d(terrain.contains(xs, ys))
    if not inside.all():
        m = int(np.argmin(inside))
        if m == 0:
            return math.inf
        s, xs, ys = s[:m], xs[:m], ys[:m]
    z = np.atleast_1d(terrain.sample(xs, ys))
    above = z > z0 + _FACE_EPS_MM
    if not above.any():
        return math.inf
    return float(s[int(np.argmax(above))])


def face_profile(
    terrain: Heightfield,
    x0: float,
    y0: float,
    z0: float,
    ux: float,
    uy: float,
    step_mm: float,
    gap_mm: float,
    probe_mm: float = 40.0,
) -> tuple[float, float]:
    """Horizontal extent and inclination of the face first met beyond gap_mm.

    Walks from the hit point to the local crest. A vertical face has zero
    extent and reports 90 degrees.
    """
    n = int(math.ceil((gap_mm + probe_mm) / step_mm))
    s = step_mm * np.arange(1, n + 1)
    xs = x0 + ux * s
    ys = y0 + uy * s
    inside = np.atleast_1d(terrain.contains(xs, ys))
    if not inside.all():
        m = int(np.argmin(inside))
        s, xs, ys = s[:m], xs[:m], ys[:m]
    z = np.atleast_1d(terrain.sample(xs, ys))
    above = z > z0 + _FACE_EPS_MM
    if not above.any():
        return 0.0, 90.0
    hi = int(np.argmax(above))
    rising = np.diff(z[hi:]) > _RISE_EPS_MM
    if rising.size == 0:
        crest = hi
    elif rising.all():
        crest = hi + rising.size
    else:
        crest = hi + int(np.argmax(~rising))
    extent = float(s[crest] - s[hi])
    rise = float(z[crest] - z0)
    angle = math.degrees(math.atan2(rise, extent))
    return extent, angle


def lock(
    config: GripperConfig,
    state: GripperState,
    terrain: Heightfield,
    asperity: AsperityModel,
    rng: np.random.Generator,
) -> GripperState:
    """Slide the holder and hook spine tips on the terrain faces they reach.

    For each contacting pin both halves march horizontally from the tip:
    the front half along +x, the back half along -x. The clearance to the
    first rising face becomes the gap; deflection is slide minus gap. A half
    engages only when its deflection reaches the bite threshold and an
    engagement draw against the face-extent probability succeeds; engaged
    halves then sample their microscopic engagement angle. Pins are visited
    in construction order so the generator stream is reproducible.
    """
    if state.phase != "adapt":
        raise PhaseError(f"lock requires adapt phase, state is in {state.phase!r}")
    reach = config.holder_slide_mm
    step = config.march_step_mm
    new_pins = []
    contacts: list[SpineContact] = []
    for pin in state.pins:
        if not pin.in_contact:
            new_pins.append(replace(pin, locked=True))
            continue
        x, y = pin_world_xy(config, state.pose, pin.j, pin.k)
        z0 = state.pose.z_mm + pin.tip_height_mm
        halves = {}
        for half, ux in (("front", 1.0), ("back", -1.0)):
            gap = find_face_gap(terrain, x, y, z0, ux, 0.0, step, reach)
            capped = min(gap, reach)
            delta = reach - capped
            halves[half] = (capped, delta)
            if delta >= config.min_bite_mm:
                extent, angle = face_profile(terrain, x, y, z0, ux, 0.0, step, capped)
                if rng.uniform() < config.engage_probability(extent):
                    beta = sample_asperity(asperity, angle, rng)
                    contacts.append(
                        SpineContact(pin.j, pin.k, half, delta, beta, extent, angle)
                    )
        new_pins.append(
            replace(
                pin,
                front_gap_mm=halves["front"][0],
                back_gap_mm=halves["back"][0],
                front_delta_mm=halves["front"][1],
                back_delta_mm=halves["back"][1],
                locked=True,
            )
        )
    return replace(
        state,
        pins=tuple(new_pins),
        phase="lock",
        holder_slide_mm=reach,
        contacts=tuple(contacts),
    )


def release(state: GripperState) -> GripperState:
    """Return the holder to neutral: zero slide, zero deflection, no contacts.

    Releasing a state that is not locked is a no-op, so release is
    idempotent. The pins stay conformed to the surface and the state drops
    back to approach, ready for a fresh adapt.
    """
    if state.phase != "lock":
        return state
    pins = tuple(
        replace(pin, front_gap_mm=0.0, back_gap_mm=0.0, front_delta_mm=0.0,
                back_delta_mm=0.0, locked=False)
        for pin in state.pins
    )
    return replace(state, pins=pins, phase="approach", holder_slide_mm=0.0, contacts=())
