"""Heightfield terrain, emulated test shapes, and the asperity-angle model.

Terrain is a single-valued elevation grid z(x, y) in millimetres with
bilinear interpolation between nodes. Generators build the shapes used by
the experiment campaigns: inclined wedges and notches for pull-off tests,
step blocks for shape recognition, and a composite relief for the mapping
scan. Each generated field keeps its exact analytic surface alongside the
grid so ground-truth queries do not inherit interpolation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import ConfigError, OutsideFootprintError

# Exact surface for ground-truth queries; takes broadcastable x, y in mm.
AnalyticSurface = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Heightfield:
    """Rectangular elevation grid with bilinear sampling.

    ``values[iy, ix]`` is the elevation in mm at
    ``(origin_x_mm + ix * cell_mm, origin_y_mm + iy * cell_mm)``.
    """

    origin_x_mm: float
    origin_y_mm: float
    cell_mm: float
    values: np.ndarray
    analytic: AnalyticSurface | None = None

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if not (self.cell_mm > 0):
            raise ConfigError(f"cell size must be positive, got {self.cell_mm}")
        if vals.ndim != 2 or vals.shape[0] < 2 or vals.shape[1] < 2:
            raise ConfigError(f"height grid must be at least 2x2 nodes, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ConfigError("height grid contains non-finite elevations")

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def x_min(self) -> float:
        return self.origin_x_mm

    @property
    def y_min(self) -> float:
        return self.origin_y_mm

    @property
    def x_max(self) -> float:
        return self.origin_x_mm + (self.cols - 1) * self.cell_mm

    @property
    def y_max(self) -> float:
        return self.origin_y_mm + (self.rows - 1) * self.cell_mm

    @property
    def z_min(self) -> float:
        return float(self.values.min())

    @property
    def z_max(self) -> float:
        return float(self.values.max())

    def contains(self, x, y):
        """True where (x, y) lies inside the footprint (small tolerance at edges)."""
        tol = 1e-9 * max(1.0, self.cell_mm)
        xa = np.asarray(x, dtype=float)
        ya = np.asarray(y, dtype=float)
        return (
            (xa >= self.x_min - tol)
            & (xa <= self.x_max + tol)
            & (ya >= self.y_min - tol)
            & (ya <= self.y_max + tol)
        )

    def sample(self, x, y):
        """Bilinearly interpolated elevation at (x, y); exact at grid nodes.

        Raises OutsideFootprintError for queries beyond the grid extent.
        Accepts scalars or arrays and broadcasts like numpy.
        """
        xa = np.asarray(x, dtype=float)
        ya = np.asarray(y, dtype=float)
        inside = self.contains(xa, ya)
        if not np.all(inside):
            bad_x = np.atleast_1d(xa)[~np.atleast_1d(inside)][:3]
            bad_y = np.atleast_1d(ya)[~np.atleast_1d(inside)][:3]
            raise OutsideFootprintError(
                f"sample outside footprint x=[{self.x_min}, {self.x_max}] "
                f"y=[{self.y_min}, {self.y_max}]: first offenders "
                f"{list(zip(bad_x.tolist(), bad_y.tolist()))}"
            )
        fx = (xa - self.origin_x_mm) / self.cell_mm
        fy = (ya - self.origin_y_mm) / self.cell_mm
        ix = np.clip(np.floor(fx).astype(int), 0, self.cols - 2)
        iy = np.clip(np.floor(fy).astype(int), 0, self.rows - 2)
        tx = fx - ix
        ty = fy - iy
        v = self.values
        z = (1.0 - ty) * ((1.0 - tx) * v[iy, ix] + tx * v[iy, ix + 1]) + ty * (
            (1.0 - tx) * v[iy + 1, ix] + tx * v[iy + 1, ix + 1]
        )
        if np.ndim(z) == 0:
            return float(z)
        return z

    def ground_truth(self, x, y):
        """Exact elevation when an analytic surface is attached, else bilinear."""
        if self.analytic is not None:
            z = self.analytic(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
            z = np.asarray(z, dtype=float)
            if z.ndim == 0:
                return float(z)
            return z
        return self.sample(x, y)

    def mirrored_x(self) -> "Heightfield":
        """Mirror image about the footprint's vertical centre line."""
        c2 = self.x_min + self.x_max  # twice the centre x
        inner = self.analytic
        mirrored = None
        if inner is not None:
            mirrored = lambda x, y: inner(c2 - np.asarray(x, dtype=float), y)  # noqa: E731
        return replace(self, values=np.flip(self.values, axis=1).copy(), analytic=mirrored)

    # -- plain-text grid serialization ------------------------------------

    def save_text(self, path: str | Path) -> None:
        """Write `cols rows cell origin_x origin_y` header plus row-major values."""
        lines = [
            f"{self.cols} {self.rows} {_fmt(self.cell_mm)} "
            f"{_fmt(self.origin_x_mm)} {_fmt(self.origin_y_mm)}"
        ]
        for row in self.values:
            lines.append(" ".join(_fmt(v) for v in row))
        Path(path).write_text("\n".join(lines) + "\n")

    @staticmethod
    def load_text(path: str | Path) -> "Heightfield":
        tokens = Path(path).read_text().split()
        if len(tokens) < 5:
            raise ConfigError(f"height grid file {path} is truncated")
        cols, rows = int(tokens[0]), int(tokens[1])
        cell, ox, oy = float(tokens[2]), float(tokens[3]), float(tokens[4])
        data = tokens[5:]
        if len(data) != rows * cols:
            raise ConfigError(
                f"height grid file {path} holds {len(data)} values, expected {rows * cols}"
            )
        vals = np.array([float(t) for t in data], dtype=float).reshape(rows, cols)
        return Heightfield(ox, oy, cell, vals)


def _fmt(v: float) -> str:
    return f"{v:.9g}"


# -- emulated shapes -------------------------------------------------------


@dataclass(frozen=True)
class WedgeSpec:
    """Symmetric wedge (inclination > 0) or notch (inclination < 0).

    The cross-section runs along x and is constant along y. Faces rise at
    ``|inclination_deg|`` from horizontal and the elevation range equals
    ``apex_height_mm``. ``surface_grit`` is a descriptor only; the matching
    microscopic behaviour lives in AsperityModel.
    """

    inclination_deg: float
    apex_height_mm: float
    footprint_mm: tuple[float, float] = (160.0, 100.0)
    surface_grit: str = "sandpaper-40"

    def __post_init__(self) -> None:
        if not abs(self.inclination_deg) <= 90.0:
            raise ConfigError(f"inclination must lie in [-90, 90] deg, got {self.inclination_deg}")
        if not self.apex_height_mm > 0:
            raise ConfigError(f"apex height must be positive, got {self.apex_height_mm}")
        w, d = self.footprint_mm
        if w <= 0 or d <= 0:
            raise ConfigError(f"footprint must be positive, got {self.footprint_mm}")


def _grid_axes(width: float, depth: float, res: float, origin: tuple[float, float]):
    nx = int(round(width / res)) + 1
    ny = int(round(depth / res)) + 1
    xs = origin[0] + res * np.arange(nx)
    ys = origin[1] + res * np.arange(ny)
    return xs, ys


def make_wedge(
    spec: WedgeSpec,
    resolution_mm: float = 1.0,
    origin: tuple[float, float] = (0.0, 0.0),
    vertical_face_width_mm: float = 8.0,
) -> Heightfield:
    """Build the heightfield for a wedge/notch spec.

    inclination 0 gives a flat plane at z = 0. Positive inclination raises a
    ridge whose faces climb at that angle to the apex; at exactly 90 deg the
    ridge degenerates, so a block of width ``vertical_face_width_mm`` with
    vertical sides stands in. Negative inclination is the exact complement:
    apex-high plateau with a notch cut to z = 0, so wedge(+a) + wedge(-a)
    sums to the apex height everywhere.
    """
    if resolution_mm <= 0:
        raise ConfigError(f"resolution must be positive, got {resolution_mm}")
    width, depth = spec.footprint_mm
    cx = origin[0] + width / 2.0
    apex = spec.apex_height_mm
    mag = abs(spec.inclination_deg)

    if mag == 0.0:
        ridge = lambda x: np.zeros_like(np.asarray(x, dtype=float))  # noqa: E731
    elif mag == 90.0:
        half_w = vertical_face_width_mm / 2.0

        def ridge(x):
            return np.where(np.abs(np.asarray(x, dtype=float) - cx) <= half_w, apex, 0.0)

    else:
        slope = math.tan(math.radians(mag))

        def ridge(x):
            return np.maximum(0.0, apex - slope * np.abs(np.asarray(x, dtype=float) - cx))

    if spec.inclination_deg >= 0:
        surface = lambda x, y: ridge(x) + 0.0 * np.asarray(y, dtype=float)  # noqa: E731
    else:
        surface = lambda x, y: apex - ridge(x) + 0.0 * np.asarray(y, dtype=float)  # noqa: E731

    xs, ys = _grid_axes(width, depth, resolution_mm, origin)
    vals = surface(xs[None, :], ys[:, None])
    return Heightfield(origin[0], origin[1], resolution_mm, vals, analytic=surface)


def make_recognition_block(
    kind: str,
    height_mm: float = 20.0,
    block_width_mm: float = 42.0,
    footprint_mm: tuple[float, float] = (140.0, 80.0),
    resolution_mm: float = 1.0,
    origin: tuple[float, float] = (-14.0, -5.2),
) -> Heightfield:
    """Step block for the shape-recognition experiment, flat along y.

    ``kind='convex'`` raises the central band by ``height_mm``;
    ``kind='concave'`` recesses it by the same amount. Defaults centre the
    band under the pin array so the three middle pin columns sit on the step.
    """
    if kind not in ("convex", "concave"):
        raise ConfigError(f"block kind must be 'convex' or 'concave', got {kind!r}")
    if height_mm <= 0 or block_width_mm <= 0:
        raise ConfigError("block height and width must be positive")
    width, depth = footprint_mm
    cx = origin[0] + width / 2.0
    half_w = block_width_mm / 2.0
    raised = kind == "convex"

    def surface(x, y):
        on_block = np.abs(np.asarray(x, dtype=float) - cx) <= half_w
        band = np.where(on_block, height_mm, 0.0) if raised else np.where(on_block, 0.0, height_mm)
        return band + 0.0 * np.asarray(y, dtype=float)

    xs, ys = _grid_axes(width, depth, resolution_mm, origin)
    vals = surface(xs[None, :], ys[:, None])
    return Heightfield(origin[0], origin[1], resolution_mm, vals, analytic=surface)


def make_mapping_terrain(
    resolution_mm: float = 0.5,
    origin: tuple[float, float] = (0.0, 14.8),
) -> Heightfield:
    """Composite relief for the scanning experiment: 200 x 40 mm footprint.

    A 25 mm base plateau carries a convex ridge rising to 45 mm, a concave
    notch cutting to 5 mm, and a band whose elevation ramps 20 mm along the
    depth axis. Maximum elevation is 45 mm over the z = 0 table plane.
    """
    width, depth = 200.0, 40.0
    base = 25.0
    x0, y0 = origin

    def surface(x, y):
        xl = np.asarray(x, dtype=float) - x0
        yl = np.asarray(y, dtype=float) - y0
        z = np.full(np.broadcast(xl, yl).shape, base, dtype=float)
        ridge = base + 20.0 * np.maximum(0.0, 1.0 - np.abs(xl - 50.0) / 20.0)
        notch = base - 20.0 * np.maximum(0.0, 1.0 - np.abs(xl - 100.0) / 20.0)
        ramp = base + 20.0 * (yl / depth - 0.5)
        z = np.where((xl >= 30.0) & (xl < 70.0), ridge, z)
        z = np.where((xl >= 80.0) & (xl < 120.0), notch, z)
        z = np.where((xl >= 140.0) & (xl < 190.0), ramp + 0.0 * z, z)
        return z

    xs, ys = _grid_axes(width, depth, resolution_mm, origin)
    vals = surface(xs[None, :], ys[:, None])
    return Heightfield(x0, y0, resolution_mm, vals, analytic=surface)


# -- microscopic asperity model --------------------------------------------


@dataclass(frozen=True)
class AsperityModel:
    """Distribution of the microscopic engagement angle on gritty surfaces.

    A spine tip hooks a surface asperity at some angle from the face plane.
    Gentle macroscopic slopes expose blunter asperities (larger angles),
    steep faces expose sharper ones, which is what makes steep terrain grip
    better. The mean engagement angle falls linearly with the magnitude of
    the face inclination; samples spread around it but are truncated so the
    self-locking singularity at atan(mu) is never crossed.
    """

    mu: float = 0.3
    angle_base_deg: float = 15.0
    angle_per_slope_deg: float = 0.5
    angle_spread_deg: float = 5.0
    floor_margin_deg: float = 1.0
    breakage_force_n: float = 8.0

    def __post_init__(self) -> None:
        if not 0 < self.mu < 1:
            raise ConfigError(f"friction coefficient must lie in (0, 1), got {self.mu}")
        if self.angle_spread_deg < 0 or self.floor_margin_deg <= 0:
            raise ConfigError("angle spread must be >= 0 and floor margin > 0")
        if self.breakage_force_n <= 0:
            raise ConfigError("breakage force must be positive")

    @property
    def floor_angle_deg(self) -> float:
        """Lower truncation bound, strictly above the self-locking angle."""
        return math.degrees(math.atan(self.mu)) + self.floor_margin_deg

    def mean_angle_deg(self, inclination_deg: float) -> float:
        """Mean engagement angle for a face at the given inclination.

        Monotone non-increasing in |inclination| and never below the floor,
        so the zero-spread sampler can return it unchanged.
        """
        mag = min(abs(inclination_deg), 90.0)
        raw = self.angle_base_deg + self.angle_per_slope_deg * (90.0 - mag)
        return min(max(raw, self.floor_angle_deg), 90.0)


def sample_asperity(model: AsperityModel, inclination_deg: float, rng: np.random.Generator) -> float:
    """Draw one engagement angle in degrees, always in (floor, 90].

    Truncated normal around the model mean; out-of-interval draws are
    redrawn a bounded number of times and finally clamped, never emitted raw.
    """
    mean = model.mean_angle_deg(inclination_deg)
    if model.angle_spread_deg == 0.0:
        return mean
    lo = model.floor_angle_deg
    for _ in range(64):
        draw = float(rng.normal(mean, model.angle_spread_deg))
        if lo < draw <= 90.0:
            return draw
    return min(max(draw, lo + 1e-9), 90.0)
