"""Grasp mechanics: elastic pushing force, asperity friction, and pull-off tests.

Each engaged spine behaves as an end-loaded cantilever whose deflection
presses the tip against a terrain face. The tip rides a microscopic
asperity at some engagement angle; resolving the contact forces along that
asperity gives an effective friction coefficient that grows without bound
as the angle approaches the self-locking angle atan(mu) and collapses to mu
itself for a square (90 degree) engagement. A grasp holds an external pull
while every contacting pin's equal share of the load stays below its
contacts' slip bounds; the first pin to slip releases the whole grasp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .config import SimConfig
from .errors import ConfigError
from .gripper import (
    GripperConfig,
    Pose,
    SpineContact,
    adapt,
    face_profile,
    find_face_gap,
    lock,
    new_gripper,
)
from .terrain import AsperityModel, Heightfield, WedgeSpec, make_wedge, sample_asperity


class SelfLockingError(Exception):
    """Engagement angle at or below the self-locking regime: the contact
    cannot slip, only break."""


def pushing_force(
    deflection_mm: float,
    modulus_pa: float,
    second_moment_m4: float,
    lever_m: float,
) -> float:
    """Tip force in newtons of an end-loaded cantilever at the given deflection.

    Args:
        deflection_mm: elastic element deflection (>= 0), in mm.
        modulus_pa: Young's modulus of the elastic element, in Pa.
        second_moment_m4: area moment of inertia of its cross-section, in m^4.
        lever_m: free bending length, in m.
    """
    if modulus_pa <= 0 or second_moment_m4 <= 0 or lever_m <= 0:
        raise ValueError("modulus, second moment, and lever length must be positive")
    if deflection_mm < 0:
        raise ValueError(f"deflection must be non-negative, got {deflection_mm}")
    return 3.0 * (deflection_mm * 1e-3) * modulus_pa * second_moment_m4 / lever_m**3


# Engagement angles closer than this (radians) to atan(mu) count as self-locking.
SINGULARITY_GUARD_RAD = 1e-3


def local_friction(mu: float, asperity_angle_deg: float) -> float:
    """Effective friction coefficient of a spine tip seated on an asperity.

    Decreases strictly as the engagement angle opens toward 90 degrees,
    where it equals the plain coefficient mu exactly (handled analytically,
    no infinite tangent is evaluated). Angles at or below the self-locking
    threshold raise SelfLockingError; callers treat such contacts as
    unconditionally non-slipping up to breakage.
    """
    if not 0 < mu < 1:
        raise ValueError(f"friction coefficient must lie in (0, 1), got {mu}")
    if not 0 < asperity_angle_deg <= 90.0:
        raise ValueError(f"engagement angle must lie in (0, 90] deg, got {asperity_angle_deg}")
    if asperity_angle_deg == 90.0:
        return mu
    angle_rad = math.radians(asperity_angle_deg)
    if angle_rad <= math.atan(mu) + SINGULARITY_GUARD_RAD:
        raise SelfLockingError(
            f"engagement angle {asperity_angle_deg:.4f} deg is in the self-locking "
            f"regime (atan(mu) = {math.degrees(math.atan(mu)):.4f} deg)"
        )
    t = math.tan(angle_rad)
    return (1.0 + mu * t) / (t - mu)


@dataclass(frozen=True)
class ContactRecord:
    """One engaged spine half with its resolved forces.

    ``capacity_n`` is the largest pull share the contact can hold: the
    friction bound, except that loads beyond the asperity breakage force
    shear the asperity off (``broken``) and drop the contact to plain
    sliding, so breakage caps the capacity. Self-locking contacts hold
    exactly up to breakage.
    """

    pin_j: int
    pin_k: int
    half: Literal["front", "back"]
    delta_mm: float
    asperity_angle_deg: float
    pushing_force_n: float
    mu_prime: float
    capacity_n: float
    broken: bool


def evaluate_contact(
    contact: SpineContact,
    config: GripperConfig,
    asperity: AsperityModel,
) -> ContactRecord:
    """Resolve a geometric spine contact into forces and slip capacity."""
    force = pushing_force(
        contact.delta_mm,
        config.elastic_modulus_pa,
        config.second_moment_m4,
        config.spine_lever_m,
    )
    brk = asperity.breakage_force_n
    try:
        mu_prime = local_friction(asperity.mu, contact.asperity_angle_deg)
        bound = mu_prime * force
        broken = bound > brk
        capacity = min(bound, brk)
    except SelfLockingError:
        mu_prime = math.inf
        broken = True
        capacity = brk
    return ContactRecord(
        pin_j=contact.j,
        pin_k=contact.k,
        half=contact.half,
        delta_mm=contact.delta_mm,
        asperity_angle_deg=contact.asperity_angle_deg,
        pushing_force_n=force,
        mu_prime=mu_prime,
        capacity_n=capacity,
        broken=broken,
    )


def contact_records(
    config: GripperConfig,
    asperity: AsperityModel,
    contacts: Sequence[SpineContact],
) -> list[ContactRecord]:
    return [evaluate_contact(c, config, asperity) for c in contacts]


def holding_condition(records: Sequence[ContactRecord]) -> float:
    """Aggregate holding bound: the sum of every engaged half's capacity.

    A pin with both halves seated on opposing faces contributes twice,
    which is where the doubled per-pin bound of a fully pinched grasp comes
    from. No contacts means zero holding force. fsum keeps the total
    independent of contact ordering.
    """
    return math.fsum(r.capacity_n for r in records)


@dataclass(frozen=True)
class PullTestResult:
    """Outcome of repeated grip-and-pull trials on one terrain."""

    inclination_deg: float
    trials: int
    holding_forces_n: tuple[float, ...]
    contact_counts: tuple[int, ...]
    per_pin_share_n: tuple[float, ...]
    mean_force_n: float
    std_force_n: float


def _summarize(inclination_deg, forces, counts, shares) -> PullTestResult:
    arr = np.asarray(forces, dtype=float)
    mean = float(arr.mean()) if arr.size else 0.0
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return PullTestResult(
        inclination_deg=inclination_deg,
        trials=len(forces),
        holding_forces_n=tuple(forces),
        contact_counts=tuple(counts),
        per_pin_share_n=tuple(shares),
        mean_force_n=mean,
        std_force_n=std,
    )


def _seed_key(seed) -> list[int]:
    if isinstance(seed, (int, np.integer)):
        return [int(seed)]
    return [int(s) for s in seed]


def _release_threshold(records: Sequence[ContactRecord], weight_n: float):
    """Max total downward force the grasp sustains, with first-slip release.

    The load divides equally over the pins holding spine contacts; the pin
    whose summed contact capacity is smallest slips first and releases the
    grasp. A grasp that cannot even sustain the terrain weight drops the
    terrain at grip time and scores exactly zero.
    """
    if not records:
        return 0.0, 0, 0.0
    per_pin: dict[tuple[int, int], list[float]] = {}
    for r in records:
        per_pin.setdefault((r.pin_j, r.pin_k), []).append(r.capacity_n)
    n = len(per_pin)
    threshold = n * min(math.fsum(caps) for caps in per_pin.values())
    if threshold < weight_n:
        return 0.0, n, 0.0
    return threshold, n, threshold / n


def wedge_spec_for(sim: SimConfig, inclination_deg: float) -> WedgeSpec:
    """Emulated pull-test terrain for one inclination.

    The wedge series keeps a fixed base half-width so the graspable face
    span stays comparable across inclinations; the apex follows the slope
    up to a cap. Flat terrain reuses the cap as a dummy apex (unused).
    """
    mag = abs(inclination_deg)
    if mag == 0.0 or mag == 90.0:
        apex = sim.wedge_apex_cap_mm
    else:
        apex = min(
            sim.wedge_base_halfwidth_mm * math.tan(math.radians(mag)),
            sim.wedge_apex_cap_mm,
        )
    return WedgeSpec(
        inclination_deg=inclination_deg,
        apex_height_mm=apex,
        footprint_mm=(sim.wedge_footprint_w_mm, sim.wedge_footprint_d_mm),
    )


def _wedge_terrain(sim: SimConfig, spec: WedgeSpec) -> Heightfield:
    # Centre the feature on the unjittered pin-array centre.
    cfg = sim.gripper()
    centre_x = (1 + cfg.pins_per_block) / 2.0 * cfg.x_pitch_mm
    centre_y = (1 + cfg.blocks) / 2.0 * cfg.y_pitch_mm
    origin = (centre_x - spec.footprint_mm[0] / 2.0, centre_y - spec.footprint_mm[1] / 2.0)
    return make_wedge(
        spec,
        resolution_mm=sim.terrain_resolution_mm,
        origin=origin,
        vertical_face_width_mm=sim.wedge_vertical_width_mm,
    )


def pull_test(
    sim: SimConfig, spec: WedgeSpec, trials: int, seed: int | Sequence[int]
) -> PullTestResult:
    """Grip the wedge terrain repeatedly and record the sustained pull.

    Every trial re-places the gripper with a uniform x offset (regripping
    never lands identically), adapts, locks with fresh asperity and
    engagement draws, and pulls straight down until first slip. The score
    is the maximum sustained total force: external pull plus terrain
    weight, or exactly zero when the grasp fails outright.
    """
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    terrain = _wedge_terrain(sim, spec)
    cfg = sim.gripper()
    asp = sim.asperity()
    z_press = terrain.z_max - cfg.travel_mm
    key = _seed_key(seed)
    forces, counts, shares = [], [], []
    for trial in range(trials):
        rng = np.random.default_rng(key + [trial])
        x_jit = float(rng.uniform(-sim.pull_jitter_mm, sim.pull_jitter_mm))
        state = new_gripper(cfg, Pose(x_jit, z_press))
        state = adapt(cfg, state, terrain)
        state = lock(cfg, state, terrain, asp, rng)
        records = contact_records(cfg, asp, state.contacts)
        force, n, share = _release_threshold(records, sim.pull_weight_n)
        forces.append(force)
        counts.append(n)
        shares.append(share)
    return _summarize(spec.inclination_deg, forces, counts, shares)


def baseline_pull_test(
    sim: SimConfig, spec: WedgeSpec, trials: int, seed: int | Sequence[int]
) -> PullTestResult:
    """Pull test for the conventional radial-finger climbing gripper.

    Fingers sit on a circle and their spines can only pinch inward toward
    the gripper centre, so they hook faces that rise toward the centre
    (convex forms). Notched terrain offers no such face: every capacity is
    zero and the grasp fails, which is the behavioural gap the pin array
    closes.
    """
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    terrain = _wedge_terrain(sim, spec)
    cfg = sim.gripper()
    asp = sim.asperity()
    centre_x = (1 + cfg.pins_per_block) / 2.0 * cfg.x_pitch_mm
    centre_y = (1 + cfg.blocks) / 2.0 * cfg.y_pitch_mm
    n_fingers = sim.baseline_fingers
    radius = sim.baseline_radius_mm
    angles = [2.0 * math.pi * i / n_fingers for i in range(n_fingers)]
    # Baseline fingers share the pin spine material but on a stiffer lever.
    finger_cfg = GripperConfig(
        elastic_modulus_pa=cfg.elastic_modulus_pa,
        second_moment_m4=cfg.second_moment_m4,
        spine_lever_m=sim.baseline_lever_m,
    )
    key = _seed_key(seed)
    forces, counts, shares = [], [], []
    for trial in range(trials):
        rng = np.random.default_rng(key + [trial])
        x_jit = float(rng.uniform(-sim.pull_jitter_mm, sim.pull_jitter_mm))
        cx = centre_x + x_jit
        records: list[ContactRecord] = []
        for i, ang in enumerate(angles):
            fx = cx + radius * math.cos(ang)
            fy = centre_y + radius * math.sin(ang)
            if not np.all(terrain.contains(fx, fy)):
                continue
            z0 = float(terrain.sample(fx, fy))
            ux, uy = -math.cos(ang), -math.sin(ang)  # inward, toward the centre
            gap = find_face_gap(terrain, fx, fy, z0, ux, uy, cfg.march_step_mm, cfg.holder_slide_mm)
            delta = cfg.holder_slide_mm - min(gap, cfg.holder_slide_mm)
            if delta < cfg.min_bite_mm:
                continue
            extent, face_angle = face_profile(
                terrain, fx, fy, z0, ux, uy, cfg.march_step_mm, min(gap, cfg.holder_slide_mm)
            )
            if rng.uniform() >= cfg.engage_probability(extent):
                continue
            beta = sample_asperity(asp, face_angle, rng)
            geom = SpineContact(i + 1, 0, "front", delta, beta, extent, face_angle)
            records.append(evaluate_contact(geom, finger_cfg, asp))
        force, n, share = _release_threshold(records, sim.pull_weight_n)
        forces.append(force)
        counts.append(n)
        shares.append(share)
    return _summarize(spec.inclination_deg, forces, counts, shares)
