"""Translate-press-read terrain scanning and grid-map fusion.

A 2-DOF rig steps the gripper across the terrain in x. At each station it
presses down until enough pins report in-range heights (or a descent
budget runs out), reads the whole bank, and lifts. Each reading becomes a
world-frame point: pin pitch offsets in x/y from the gripper pose, pose
height plus sensed tip height in z. Out-of-range pins clamp to the sensing
window edge, so they land far off the true surface; column averaging over
the accumulated cloud attenuates them, which is measured explicitly here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, SimulationError
from .gripper import GripperConfig, Pose, adapt, new_gripper, pin_world_xy
from .sensing import SensorCalibration, read_pins
from .terrain import Heightfield

FLOAT_FMT = "{:.6f}"


@dataclass(frozen=True)
class ScanPlan:
    """Station spacing, press policy, and binning for one scan campaign.

    The press policy lowers the gripper from first window entry of the
    tallest pin in ``press_step_mm`` increments until at least
    ``press_target_frac`` of the pins report in-range heights, stopping
    early when the descent budget or the tallest pin's travel is exhausted.
    ``include_clamped`` keeps out-of-range (window-clamped) readings in the
    cloud; turning it off drops them at the source.
    """

    start_x_mm: float = -10.0
    dx_mm: float = 10.0
    steps: int = 12
    press_target_frac: float = 0.8
    press_step_mm: float = 1.0
    max_descent_mm: float = 6.0
    include_clamped: bool = True
    bin_w_mm: float = 10.0
    bin_d_mm: float = 15.0

    def __post_init__(self):
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if self.dx_mm <= 0 or self.press_step_mm <= 0:
            raise ConfigError("dx_mm and press_step_mm must be positive")
        if not 0 < self.press_target_frac <= 1:
            raise ConfigError(f"press_target_frac must lie in (0, 1], got {self.press_target_frac}")
        if self.max_descent_mm < 0:
            raise ConfigError(f"max_descent_mm must be non-negative, got {self.max_descent_mm}")
        if self.bin_w_mm <= 0 or self.bin_d_mm <= 0:
            raise ConfigError("bin sizes must be positive")


@dataclass(frozen=True)
class ScanPose:
    step: int
    x_mm: float
    z_mm: float


@dataclass(frozen=True)
class ScanPoint:
    """One world-frame tactile sample."""

    step: int
    j: int
    k: int
    x_mm: float
    y_mm: float
    z_mm: float
    height_mm: float  # sensed tip height the z coordinate was built from
    in_range: bool


@dataclass(frozen=True)
class PointCloud:
    points: tuple[ScanPoint, ...]
    poses: tuple[ScanPose, ...]


def run_scan(
    config: GripperConfig,
    calibration: SensorCalibration,
    terrain: Heightfield,
    plan: ScanPlan,
    rng: np.random.Generator | None = None,
) -> PointCloud:
    """Execute the full translate-press-read loop over every station.

    Returns one point per pin per station (fewer when ``include_clamped``
    is off). Pass ``rng=None`` for a noiseless scan.
    """
    points: list[ScanPoint] = []
    poses: list[ScanPose] = []
    for step in range(plan.steps):
        x_g = plan.start_x_mm + step * plan.dx_mm
        probe = new_gripper(config, Pose(x_g, 0.0))
        xs = np.array([pin_world_xy(config, probe.pose, p.j, p.k)[0] for p in probe.pins])
        ys = np.array([pin_world_xy(config, probe.pose, p.j, p.k)[1] for p in probe.pins])
        t_max = float(np.max(terrain.sample(xs, ys)))
        z_top = t_max - config.height_offset_mm
        z_floor = max(t_max - config.travel_mm, z_top - plan.max_descent_mm)
        z = z_top
        while True:
            state = adapt(config, new_gripper(config, Pose(x_g, z)), terrain)
            readings = read_pins(config, state, calibration, rng)
            frac = sum(r.in_range for r in readings) / len(readings)
            if frac >= plan.press_target_frac - 1e-12:
                break
            if z - plan.press_step_mm < z_floor - 1e-9:
                break
            z -= plan.press_step_mm
        if not any(p.in_contact for p in state.pins):
            raise SimulationError(f"non-conforming press at step {step}: no pin contacts terrain")
        poses.append(ScanPose(step=step, x_mm=x_g, z_mm=z))
        for reading in readings:
            if not (reading.in_range or plan.include_clamped):
                continue
            px, py = pin_world_xy(config, state.pose, reading.j, reading.k)
            points.append(
                ScanPoint(
                    step=step,
                    j=reading.j,
                    k=reading.k,
                    x_mm=px,
                    y_mm=py,
                    z_mm=z + reading.height_mm,
                    height_mm=reading.height_mm,
                    in_range=reading.in_range,
                )
            )
    return PointCloud(points=tuple(points), poses=tuple(poses))


@dataclass(frozen=True)
class GridColumn:
    """One x-y column of the fused map (centre coordinates)."""

    x_mm: float
    y_mm: float
    mean_z_mm: float  # nan when empty
    n_samples: int
    abs_err_mm: float  # |mean - ground truth at centre|, nan when empty


@dataclass(frozen=True)
class GridMap:
    bin_w_mm: float
    bin_d_mm: float
    columns: tuple[GridColumn, ...]
    truth: Heightfield

    @property
    def e_bar_mm(self) -> float:
        """Mean absolute column error over non-empty columns."""
        errs = [c.abs_err_mm for c in self.columns if c.n_samples > 0]
        if not errs:
            raise SimulationError("grid map has no occupied columns")
        return float(np.mean(errs))


def bin_average(
    cloud: PointCloud,
    ground_truth: Heightfield,
    bin_w_mm: float = 10.0,
    bin_d_mm: float = 15.0,
) -> GridMap:
    """Average cloud z values over x-y columns anchored at the terrain origin.

    Column truth is queried at the column centre (clamped into the
    footprint for partial edge columns).
    """
    if bin_w_mm <= 0 or bin_d_mm <= 0:
        raise ConfigError("bin sizes must be positive")
    x0, y0 = ground_truth.x_min, ground_truth.y_min
    span_x = ground_truth.x_max - x0
    span_y = ground_truth.y_max - y0
    nx = max(1, math.ceil(span_x / bin_w_mm - 1e-12))
    ny = max(1, math.ceil(span_y / bin_d_mm - 1e-12))
    sums = np.zeros((ny, nx))
    counts = np.zeros((ny, nx), dtype=int)
    for p in cloud.points:
        ix = min(int((p.x_mm - x0) // bin_w_mm), nx - 1)
        iy = min(int((p.y_mm - y0) // bin_d_mm), ny - 1)
        if not (0 <= ix < nx and 0 <= iy < ny):
            raise SimulationError(
                f"scan point ({p.x_mm:.3f}, {p.y_mm:.3f}) lies outside the map footprint"
            )
        sums[iy, ix] += p.z_mm
        counts[iy, ix] += 1
    columns = []
    for iy in range(ny):
        for ix in range(nx):
            cx = min(x0 + (ix + 0.5) * bin_w_mm, ground_truth.x_max)
            cy = min(y0 + (iy + 0.5) * bin_d_mm, ground_truth.y_max)
            n = int(counts[iy, ix])
            if n > 0:
                mean_z = sums[iy, ix] / n
                err = abs(mean_z - float(ground_truth.ground_truth(cx, cy)))
            else:
                mean_z, err = math.nan, math.nan
            columns.append(
                GridColumn(x_mm=cx, y_mm=cy, mean_z_mm=float(mean_z), n_samples=n, abs_err_mm=err)
            )
    return GridMap(bin_w_mm=bin_w_mm, bin_d_mm=bin_d_mm, columns=tuple(columns), truth=ground_truth)


@dataclass(frozen=True)
class OutlierReport:
    """How strongly column averaging attenuates far-off points."""

    threshold_mm: float
    n_points: int
    n_far_points: int
    far_point_fraction: float
    max_point_error_mm: float
    n_columns: int
    n_far_columns: int
    far_column_fraction: float
    max_column_error_mm: float
    attenuation_ratio: float  # far point fraction / far column fraction


def outlier_attenuation_report(
    cloud: PointCloud,
    grid: GridMap,
    threshold_mm: float = 5.0,
) -> OutlierReport:
    """Count points and columns farther than a threshold from ground truth."""
    if threshold_mm <= 0:
        raise ConfigError(f"threshold_mm must be positive, got {threshold_mm}")
    truth = grid.truth
    point_errs = np.array(
        [abs(p.z_mm - float(truth.ground_truth(p.x_mm, p.y_mm))) for p in cloud.points]
    )
    col_errs = np.array([c.abs_err_mm for c in grid.columns if c.n_samples > 0])
    n_far_pts = int(np.sum(point_errs > threshold_mm)) if point_errs.size else 0
    n_far_cols = int(np.sum(col_errs > threshold_mm)) if col_errs.size else 0
    pt_frac = n_far_pts / point_errs.size if point_errs.size else 0.0
    col_frac = n_far_cols / col_errs.size if col_errs.size else 0.0
    if col_frac > 0:
        ratio = pt_frac / col_frac
    else:
        ratio = math.inf if pt_frac > 0 else 1.0
    return OutlierReport(
        threshold_mm=threshold_mm,
        n_points=int(point_errs.size),
        n_far_points=n_far_pts,
        far_point_fraction=float(pt_frac),
        max_point_error_mm=float(point_errs.max()) if point_errs.size else 0.0,
        n_columns=int(col_errs.size),
        n_far_columns=n_far_cols,
        far_column_fraction=float(col_frac),
        max_column_error_mm=float(col_errs.max()) if col_errs.size else 0.0,
        attenuation_ratio=float(ratio),
    )


def ply_text(cloud: PointCloud) -> str:
    """ASCII PLY with one vertex element per scan point, coordinates in mm."""
    lines = [
        "ply",
        "format ascii 1.0",
        "comment tactile scan point cloud, coordinates in mm",
        f"element vertex {len(cloud.points)}",
        "property float x",
        "property float y",
        "property float z",
        "end_header",
    ]
    for p in cloud.points:
        lines.append(
            f"{FLOAT_FMT.format(p.x_mm)} {FLOAT_FMT.format(p.y_mm)} {FLOAT_FMT.format(p.z_mm)}"
        )
    return "\n".join(lines) + "\n"


def points_csv_text(cloud: PointCloud) -> str:
    lines = ["step,j,k,x_mm,y_mm,z_mm"]
    for p in cloud.points:
        lines.append(
            f"{p.step},{p.j},{p.k},{FLOAT_FMT.format(p.x_mm)},"
            f"{FLOAT_FMT.format(p.y_mm)},{FLOAT_FMT.format(p.z_mm)}"
        )
    return "\n".join(lines) + "\n"


def grid_csv_text(grid: GridMap) -> str:
    lines = ["col_x,col_y,mean_z_mm,n_samples,abs_err_mm"]
    for c in grid.columns:
        lines.append(
            f"{FLOAT_FMT.format(c.x_mm)},{FLOAT_FMT.format(c.y_mm)},"
            f"{FLOAT_FMT.format(c.mean_z_mm)},{c.n_samples},{FLOAT_FMT.format(c.abs_err_mm)}"
        )
    return "\n".join(lines) + "\n"


def summary_csv_text(grid: GridMap) -> str:
    return "e_bar_mm\n" + FLOAT_FMT.format(grid.e_bar_mm) + "\n"
