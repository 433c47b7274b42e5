"""Flat run configuration: every tunable knob in one dataclass.

The file format is deliberately plain: one `key = value` per line, `#`
comments, booleans as true/false. Values are typed from the dataclass
field annotations; unknown keys are errors rather than silent typos.
The typed views at the bottom hand subsystems their own parameter
objects, so nothing downstream needs to know about this class.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .gripper import GripperConfig
from .mapping import ScanPlan
from .terrain import AsperityModel


@dataclass(frozen=True)
class SimConfig:
    # pin array geometry
    blocks: int = 3
    pins_per_block: int = 7
    x_pitch_mm: float = 14.0
    y_pitch_mm: float = 17.4
    stroke_mm: float = 20.0
    height_offset_mm: float = 16.0
    holder_slide_mm: float = 6.0
    pin_width_mm: float = 6.0
    # spine engagement
    min_bite_mm: float = 3.0
    engage_floor_prob: float = 0.3
    march_step_mm: float = 0.1
    # spine elasticity
    elastic_modulus_pa: float = 2.4e9
    second_moment_m4: float = 8.0e-14
    spine_lever_m: float = 0.02
    # asperity friction
    mu: float = 0.3
    asperity_base_deg: float = 15.0
    asperity_gain_deg: float = 0.5
    asperity_spread_deg: float = 5.0
    asperity_floor_margin_deg: float = 1.0
    breakage_force_n: float = 8.0
    # pull-test campaign
    pull_weight_n: float = 4.9
    pull_jitter_mm: float = 7.0
    pull_trials: int = 10
    wedge_base_halfwidth_mm: float = 20.0
    wedge_apex_cap_mm: float = 30.0
    wedge_vertical_width_mm: float = 8.0
    wedge_footprint_w_mm: float = 160.0
    wedge_footprint_d_mm: float = 100.0
    terrain_resolution_mm: float = 1.0
    # reduced-contact baseline gripper
    baseline_fingers: int = 8
    baseline_radius_mm: float = 22.0
    baseline_lever_m: float = 0.016
    # sensing
    nominal_r_max_ohm: float = 10_000.0
    nominal_r_min_ohm: float = 1_000.0
    endpoint_spread: float = 0.15
    sigma_floor_mm: float = 0.16
    sigma_span_mm: float = 6.53
    sigma_beta_a: float = 3.0
    sigma_beta_b: float = 2.03
    presses: int = 10
    recognition_block_height_mm: float = 20.0
    # scan campaign
    scan_start_x_mm: float = -10.0
    scan_dx_mm: float = 10.0
    scan_steps: int = 12
    press_target_frac: float = 0.8
    press_step_mm: float = 1.0
    max_descent_mm: float = 6.0
    include_clamped: bool = True
    bin_w_mm: float = 10.0
    bin_d_mm: float = 15.0

    def __post_init__(self):
        # geometry/physics fields are validated by the typed views below;
        # campaign-only knobs are checked here
        positive = (
            "wedge_base_halfwidth_mm",
            "wedge_apex_cap_mm",
            "wedge_vertical_width_mm",
            "wedge_footprint_w_mm",
            "wedge_footprint_d_mm",
            "terrain_resolution_mm",
            "baseline_radius_mm",
            "baseline_lever_m",
            "nominal_r_min_ohm",
            "sigma_span_mm",
            "sigma_beta_a",
            "sigma_beta_b",
            "recognition_block_height_mm",
        )
        for name in positive:
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.pull_weight_n < 0 or self.pull_jitter_mm < 0 or self.sigma_floor_mm < 0:
            raise ConfigError("pull_weight_n, pull_jitter_mm, sigma_floor_mm must be >= 0")
        if self.pull_trials < 1 or self.presses < 1 or self.baseline_fingers < 1:
            raise ConfigError("pull_trials, presses, baseline_fingers must be >= 1")
        if self.nominal_r_max_ohm <= self.nominal_r_min_ohm:
            raise ConfigError("nominal_r_max_ohm must exceed nominal_r_min_ohm")
        if not 0 <= self.endpoint_spread < 1:
            raise ConfigError(f"endpoint_spread must lie in [0, 1), got {self.endpoint_spread}")
        # constructing the views applies their own field validation now,
        # so a bad file fails at load time rather than mid-campaign
        self.gripper()
        self.asperity()
        self.scan_plan()

    # typed views -------------------------------------------------------

    def gripper(self) -> GripperConfig:
        return GripperConfig(
            blocks=self.blocks,
            pins_per_block=self.pins_per_block,
            x_pitch_mm=self.x_pitch_mm,
            y_pitch_mm=self.y_pitch_mm,
            stroke_mm=self.stroke_mm,
            height_offset_mm=self.height_offset_mm,
            holder_slide_mm=self.holder_slide_mm,
            pin_width_mm=self.pin_width_mm,
            min_bite_mm=self.min_bite_mm,
            engage_floor_prob=self.engage_floor_prob,
            march_step_mm=self.march_step_mm,
            elastic_modulus_pa=self.elastic_modulus_pa,
            second_moment_m4=self.second_moment_m4,
            spine_lever_m=self.spine_lever_m,
        )

    def asperity(self) -> AsperityModel:
        return AsperityModel(
            mu=self.mu,
            angle_base_deg=self.asperity_base_deg,
            angle_per_slope_deg=self.asperity_gain_deg,
            angle_spread_deg=self.asperity_spread_deg,
            floor_margin_deg=self.asperity_floor_margin_deg,
            breakage_force_n=self.breakage_force_n,
        )

    def scan_plan(self) -> ScanPlan:
        return ScanPlan(
            start_x_mm=self.scan_start_x_mm,
            dx_mm=self.scan_dx_mm,
            steps=self.scan_steps,
            press_target_frac=self.press_target_frac,
            press_step_mm=self.press_step_mm,
            max_descent_mm=self.max_descent_mm,
            include_clamped=self.include_clamped,
            bin_w_mm=self.bin_w_mm,
            bin_d_mm=self.bin_d_mm,
        )


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value) if isinstance(value, float) else str(value)


def _parse_value(field: dataclasses.Field, raw: str):
    if field.type in ("bool", bool):
        low = raw.lower()
        if low not in ("true", "false"):
            raise ConfigError(f"{field.name}: expected true/false, got {raw!r}")
        return low == "true"
    try:
        if field.type in ("int", int):
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{field.name}: cannot parse {raw!r}") from exc


def config_text(config: SimConfig) -> str:
    lines = ["# pin-array gripper simulator configuration"]
    for f in dataclasses.fields(config):
        lines.append(f"{f.name} = {_format_value(getattr(config, f.name))}")
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> SimConfig:
    fields = {f.name: f for f in dataclasses.fields(SimConfig)}
    overrides = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in fields:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if not raw:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        overrides[key] = _parse_value(fields[key], raw)
    try:
        return SimConfig(**overrides)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> SimConfig:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    return parse_config(p.read_text())


def save_config(config: SimConfig, path: str | Path) -> None:
    Path(path).write_text(config_text(config))
