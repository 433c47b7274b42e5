"""Heightfield sampling, terrain builders, and the asperity angle model."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pingrip.errors import ConfigError, OutsideFootprintError
from pingrip.terrain import (
    AsperityModel,
    Heightfield,
    WedgeSpec,
    make_mapping_terrain,
    make_recognition_block,
    make_wedge,
    sample_asperity,
)


def grid(values, origin=(0.0, 0.0), cell=1.0):
    return Heightfield(origin[0], origin[1], cell, np.asarray(values, dtype=float))


# -- bilinear sampling ------------------------------------------------------


def test_sample_matches_hand_computed_bilinear():
    f = grid([[0.0, 1.0], [2.0, 3.0]])
    # corners are exact
    assert f.sample(0.0, 0.0) == 0.0
    assert f.sample(1.0, 0.0) == 1.0
    assert f.sample(0.0, 1.0) == 2.0
    assert f.sample(1.0, 1.0) == 3.0
    assert f.sample(0.5, 0.5) == pytest.approx(1.5, abs=1e-12)
    # fx=0.25, fy=0.75: rows interpolate to 0.25 and 2.25, blend to 1.75
    assert f.sample(0.25, 0.75) == pytest.approx(1.75, abs=1e-12)


def test_sample_broadcasts_like_numpy():
    f = grid([[0.0, 1.0], [2.0, 3.0]])
    xs = np.array([0.0, 0.5, 1.0])
    zs = f.sample(xs, np.array([0.0, 0.5, 1.0]))
    assert zs.shape == (3,)
    for x, y, z in zip(xs, [0.0, 0.5, 1.0], zs):
        assert z == f.sample(x, y)


@settings(max_examples=60, deadline=None)
@given(
    a=st.floats(-50, 50),
    b=st.floats(-2, 2),
    c=st.floats(-2, 2),
    px=st.floats(0, 6),
    py=st.floats(0, 4),
)
def test_sample_reproduces_affine_surfaces_exactly(a, b, c, px, py):
    # bilinear interpolation is exact for z = a + b*x + c*y
    xs = np.arange(7.0)
    ys = np.arange(5.0)
    vals = a + b * xs[None, :] + c * ys[:, None]
    f = grid(vals)
    assert f.sample(px, py) == pytest.approx(a + b * px + c * py, abs=1e-9)


def test_sample_outside_footprint_raises():
    f = grid([[0.0, 1.0], [2.0, 3.0]])
    assert not f.contains(1.5, 0.5)
    with pytest.raises(OutsideFootprintError):
        f.sample(1.5, 0.5)
    with pytest.raises(OutsideFootprintError):
        f.sample(np.array([0.5, -0.5]), np.array([0.5, 0.5]))


def test_extent_properties():
    f = grid([[0.0, 1.0, 5.0], [2.0, 3.0, -1.0]], origin=(10.0, 20.0), cell=2.0)
    assert (f.x_min, f.x_max) == (10.0, 14.0)
    assert (f.y_min, f.y_max) == (20.0, 22.0)
    assert f.z_min == -1.0 and f.z_max == 5.0
    assert (f.rows, f.cols) == (2, 3)


def test_grid_validation():
    with pytest.raises(ConfigError):
        grid([[0.0, 1.0]])  # single row
    with pytest.raises(ConfigError):
        Heightfield(0.0, 0.0, -1.0, np.zeros((2, 2)))
    with pytest.raises(ConfigError):
        grid([[0.0, np.nan], [0.0, 0.0]])


def test_mirrored_x_reflects_samples():
    rng = np.random.default_rng(7)
    f = grid(rng.uniform(0, 10, (5, 9)), origin=(3.0, -2.0))
    m = f.mirrored_x()
    c2 = f.x_min + f.x_max
    for x, y in [(3.0, -2.0), (5.5, 0.25), (11.0, 2.0), (7.0, -1.0)]:
        assert m.sample(c2 - x, y) == pytest.approx(f.sample(x, y), abs=1e-9)
    np.testing.assert_array_equal(m.mirrored_x().values, f.values)


def test_text_round_trip(tmp_path):
    vals = np.array([[0.0, 1.5], [2.25, -3.125]])  # exact in 9 significant digits
    f = grid(vals, origin=(1.5, -2.5), cell=0.5)
    p = tmp_path / "field.txt"
    f.save_text(p)
    g = Heightfield.load_text(p)
    assert (g.origin_x_mm, g.origin_y_mm, g.cell_mm) == (1.5, -2.5, 0.5)
    np.testing.assert_array_equal(g.values, vals)
    assert g.analytic is None


def test_load_text_rejects_truncated_files(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("2 2 1.0 0.0 0.0\n1.0 2.0 3.0\n")  # one value short
    with pytest.raises(ConfigError):
        Heightfield.load_text(p)


# -- wedge builder ----------------------------------------------------------


def test_wedge_faces_climb_at_the_stated_angle():
    spec = WedgeSpec(inclination_deg=30.0, apex_height_mm=11.547)
    f = make_wedge(spec, resolution_mm=1.0)
    cx = (f.x_min + f.x_max) / 2.0
    slope = math.tan(math.radians(30.0))
    assert f.sample(cx, 10.0) == pytest.approx(11.547, abs=1e-6)
    # one mm off the apex the surface drops by exactly the slope
    assert f.sample(cx + 5.0, 10.0) == pytest.approx(11.547 - 5 * slope, abs=1e-6)
    assert f.sample(cx - 5.0, 10.0) == pytest.approx(11.547 - 5 * slope, abs=1e-6)
    # beyond the foot of the ridge the plane is flat zero
    assert f.sample(f.x_min + 1.0, 10.0) == 0.0


def test_wedge_and_notch_are_exact_complements():
    up = make_wedge(WedgeSpec(60.0, 30.0), resolution_mm=1.0)
    down = make_wedge(WedgeSpec(-60.0, 30.0), resolution_mm=1.0)
    np.testing.assert_allclose(up.values + down.values, 30.0, atol=1e-9)


def test_flat_wedge_is_a_zero_plane():
    f = make_wedge(WedgeSpec(0.0, 30.0), resolution_mm=1.0)
    assert f.z_min == 0.0 and f.z_max == 0.0


def test_vertical_wedge_is_a_block_of_configured_width():
    f = make_wedge(WedgeSpec(90.0, 30.0), resolution_mm=1.0, vertical_face_width_mm=8.0)
    cx = (f.x_min + f.x_max) / 2.0
    y = 10.0
    assert f.sample(cx, y) == 30.0
    assert f.sample(cx + 3.9, y) == 30.0
    assert f.sample(cx + 6.0, y) == 0.0
    assert f.sample(cx - 6.0, y) == 0.0


def test_wedge_spec_validation():
    with pytest.raises(ConfigError):
        WedgeSpec(120.0, 10.0)
    with pytest.raises(ConfigError):
        WedgeSpec(30.0, 0.0)
    with pytest.raises(ConfigError):
        WedgeSpec(30.0, 10.0, footprint_mm=(0.0, 50.0))


# -- recognition blocks and the scan relief ---------------------------------


def test_recognition_blocks_step_by_the_block_height():
    up = make_recognition_block("convex")
    down = make_recognition_block("concave")
    cx = (up.x_min + up.x_max) / 2.0
    y = 20.0
    assert up.sample(cx, y) - up.sample(up.x_min + 1.0, y) == 20.0
    assert down.sample(cx, y) - down.sample(down.x_min + 1.0, y) == -20.0
    # the two kinds are complements of each other
    np.testing.assert_allclose(up.values + down.values, 20.0, atol=1e-12)
    with pytest.raises(ConfigError):
        make_recognition_block("flat")


def test_mapping_terrain_hits_its_landmark_elevations():
    f = make_mapping_terrain()
    y_mid = f.y_min + 20.0
    assert f.ground_truth(f.x_min + 20.0, y_mid) == 25.0   # base plateau
    assert f.ground_truth(f.x_min + 50.0, y_mid) == 45.0   # ridge crest
    assert f.ground_truth(f.x_min + 100.0, y_mid) == 5.0   # notch bottom
    # ramp band rises along y from 15 to 35
    assert f.ground_truth(f.x_min + 165.0, f.y_min) == pytest.approx(15.0, abs=1e-9)
    assert f.ground_truth(f.x_min + 165.0, f.y_max) == pytest.approx(35.0, abs=1e-9)
    assert f.z_max - f.z_min == pytest.approx(40.0, abs=1e-9)


def test_ground_truth_agrees_with_grid_at_nodes():
    f = make_mapping_terrain(resolution_mm=0.5)
    xs = f.x_min + 0.5 * np.arange(0, 81, 16)
    ys = np.full_like(xs, f.y_min + 10.0)
    np.testing.assert_allclose(f.sample(xs, ys), f.ground_truth(xs, ys), atol=1e-12)


# -- asperity angles ---------------------------------------------------------


def test_mean_angle_tracks_inclination():
    m = AsperityModel()
    assert m.mean_angle_deg(0.0) == 60.0
    assert m.mean_angle_deg(60.0) == 30.0
    assert m.mean_angle_deg(-60.0) == 30.0
    # steep faces bottom out at the floor, never below
    floor = math.degrees(math.atan(m.mu)) + m.floor_margin_deg
    assert m.mean_angle_deg(90.0) == pytest.approx(floor)
    assert m.mean_angle_deg(150.0) == m.mean_angle_deg(90.0)


@settings(max_examples=60, deadline=None)
@given(a=st.floats(0, 90), b=st.floats(0, 90))
def test_mean_angle_is_monotone_in_slope_magnitude(a, b):
    m = AsperityModel()
    lo, hi = sorted((a, b))
    assert m.mean_angle_deg(hi) <= m.mean_angle_deg(lo)


@settings(max_examples=60, deadline=None)
@given(phi=st.floats(-90, 90), seed=st.integers(0, 2**31 - 1))
def test_samples_stay_inside_the_safe_interval(phi, seed):
    m = AsperityModel()
    rng = np.random.default_rng(seed)
    draws = [sample_asperity(m, phi, rng) for _ in range(32)]
    assert all(m.floor_angle_deg < d <= 90.0 for d in draws)


def test_zero_spread_returns_the_mean_exactly():
    m = AsperityModel(angle_spread_deg=0.0)
    rng = np.random.default_rng(0)
    assert sample_asperity(m, 60.0, rng) == m.mean_angle_deg(60.0)


def test_sampling_is_reproducible():
    m = AsperityModel()
    a = [sample_asperity(m, 45.0, np.random.default_rng(3)) for _ in range(1)]
    b = [sample_asperity(m, 45.0, np.random.default_rng(3)) for _ in range(1)]
    assert a == b


def test_asperity_model_validation():
    with pytest.raises(ConfigError):
        AsperityModel(mu=0.0)
    with pytest.raises(ConfigError):
        AsperityModel(mu=1.5)
    with pytest.raises(ConfigError):
        AsperityModel(breakage_force_n=0.0)
