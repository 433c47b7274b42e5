"""Translate-press-read scanning, column averaging, and export text formats."""

import math

import numpy as np
import pytest

from conftest import flat_field
from pingrip.errors import ConfigError, OutsideFootprintError, SimulationError
from pingrip.gripper import GripperConfig
from pingrip.mapping import (
    FLOAT_FMT,
    GridMap,
    PointCloud,
    ScanPlan,
    ScanPoint,
    bin_average,
    grid_csv_text,
    outlier_attenuation_report,
    ply_text,
    points_csv_text,
    run_scan,
    summary_csv_text,
)
from pingrip.sensing import calibrate_bank
from pingrip.terrain import make_mapping_terrain


def bank(seed=0):
    return calibrate_bank(21, np.random.default_rng(seed))


def point(x, y, z, step=0, j=1, k=1):
    return ScanPoint(step=step, j=j, k=k, x_mm=x, y_mm=y, z_mm=z,
                     height_mm=20.0, in_range=True)


def test_scan_plan_validation():
    for bad in (
        dict(steps=0),
        dict(dx_mm=0.0),
        dict(press_step_mm=-1.0),
        dict(press_target_frac=0.0),
        dict(press_target_frac=1.5),
        dict(max_descent_mm=-0.1),
        dict(bin_w_mm=0.0),
    ):
        with pytest.raises(ConfigError):
            ScanPlan(**bad)


# -- column averaging ----------------------------------------------------------


def test_bin_average_matches_a_hand_computed_grid():
    truth = flat_field(25.0, width=20.0, depth=15.0)
    cloud = PointCloud(
        points=(
            point(2.0, 7.0, 24.0), point(3.0, 3.0, 26.0), point(9.0, 1.0, 28.0),
            point(12.0, 5.0, 20.0), point(15.0, 10.0, 30.0), point(19.0, 0.0, 25.0),
        ),
        poses=(),
    )
    grid = bin_average(cloud, truth, bin_w_mm=10.0, bin_d_mm=15.0)
    assert len(grid.columns) == 2
    left, right = grid.columns
    assert (left.x_mm, left.y_mm) == (5.0, 7.5)
    assert left.n_samples == 3
    assert left.mean_z_mm == pytest.approx(26.0, abs=1e-12)
    assert left.abs_err_mm == pytest.approx(1.0, abs=1e-12)
    assert right.n_samples == 3
    assert right.mean_z_mm == pytest.approx(25.0, abs=1e-12)
    assert right.abs_err_mm == pytest.approx(0.0, abs=1e-12)
    assert grid.e_bar_mm == pytest.approx(0.5, abs=1e-12)


def test_bin_average_keeps_edge_points_in_the_last_column():
    truth = flat_field(25.0, width=20.0, depth=15.0)
    cloud = PointCloud(points=(point(20.0, 15.0, 25.0),), poses=())
    grid = bin_average(cloud, truth, bin_w_mm=10.0, bin_d_mm=15.0)
    assert [c.n_samples for c in grid.columns] == [0, 1]


def test_bin_average_skips_empty_columns_in_the_error_mean():
    truth = flat_field(25.0, width=30.0, depth=15.0)
    cloud = PointCloud(points=(point(2.0, 2.0, 27.0), point(12.0, 2.0, 25.0)), poses=())
    grid = bin_average(cloud, truth, bin_w_mm=10.0, bin_d_mm=15.0)
    assert [c.n_samples for c in grid.columns] == [1, 1, 0]
    assert math.isnan(grid.columns[2].mean_z_mm)
    assert grid.e_bar_mm == pytest.approx(1.0, abs=1e-12)  # (2 + 0) / 2


def test_bin_average_rejects_points_off_the_footprint():
    truth = flat_field(25.0, width=20.0, depth=15.0)
    cloud = PointCloud(points=(point(-1.0, 5.0, 25.0),), poses=())
    with pytest.raises(SimulationError):
        bin_average(cloud, truth)


def test_empty_grid_has_no_error_estimate():
    truth = flat_field(25.0, width=20.0, depth=15.0)
    grid = bin_average(PointCloud(points=(), poses=()), truth)
    with pytest.raises(SimulationError):
        grid.e_bar_mm


def test_outlier_report_recounts_the_cloud():
    terrain = make_mapping_terrain()
    plan = ScanPlan()
    cloud = run_scan(GripperConfig(), bank(), terrain, plan, np.random.default_rng(0))
    grid = bin_average(cloud, terrain, plan.bin_w_mm, plan.bin_d_mm)
    rep = outlier_attenuation_report(cloud, grid, threshold_mm=5.0)
    errs = [abs(p.z_mm - terrain.ground_truth(p.x_mm, p.y_mm)) for p in cloud.points]
    assert rep.n_points == len(cloud.points)
    assert rep.n_far_points == sum(e > 5.0 for e in errs)
    assert rep.max_point_error_mm == pytest.approx(max(errs), abs=1e-12)
    col_errs = [c.abs_err_mm for c in grid.columns if c.n_samples > 0]
    assert rep.n_far_columns == sum(e > 5.0 for e in col_errs)
    assert rep.far_point_fraction == pytest.approx(rep.n_far_points / rep.n_points)
    with pytest.raises(ConfigError):
        outlier_attenuation_report(cloud, grid, threshold_mm=0.0)


# -- scanning -------------------------------------------------------------------


def test_noiseless_scan_reproduces_the_terrain_where_pins_reach():
    terrain = make_mapping_terrain()
    plan = ScanPlan()
    cloud = run_scan(GripperConfig(), bank(), terrain, plan, rng=None)
    in_range = [p for p in cloud.points if p.in_range]
    # every station ranges at least its tallest pin
    assert {p.step for p in in_range} == set(range(plan.steps))
    for p in in_range:
        assert p.z_mm == pytest.approx(terrain.ground_truth(p.x_mm, p.y_mm), abs=1e-9)


def test_scan_points_recompose_exactly_from_pose_and_height():
    terrain = make_mapping_terrain()
    cloud = run_scan(GripperConfig(), bank(), terrain, ScanPlan(),
                     np.random.default_rng(3))
    pose_z = {pose.step: pose.z_mm for pose in cloud.poses}
    for p in cloud.points:
        assert p.z_mm == pose_z[p.step] + p.height_mm


def test_scan_covers_every_station_and_pin():
    terrain = make_mapping_terrain()
    plan = ScanPlan()
    cloud = run_scan(GripperConfig(), bank(), terrain, plan, np.random.default_rng(1))
    assert len(cloud.poses) == plan.steps
    assert len(cloud.points) == plan.steps * 21  # clamped readings included
    assert {p.step for p in cloud.points} == set(range(plan.steps))


def test_scan_descends_at_most_the_budget():
    terrain = make_mapping_terrain()
    plan = ScanPlan()
    cfg = GripperConfig()
    cloud = run_scan(cfg, bank(), terrain, plan, np.random.default_rng(2))
    for pose in cloud.poses:
        # the station entry depth is the tallest pin at the window top
        xs = [pose.x_mm + j * cfg.x_pitch_mm for j in range(1, 8) for _ in (1, 2, 3)]
        ys = [k * cfg.y_pitch_mm for _ in range(1, 8) for k in (1, 2, 3)]
        t_max = max(terrain.sample(np.array(xs), np.array(ys)))
        z_top = t_max - cfg.height_offset_mm
        assert pose.z_mm <= z_top + 1e-9
        assert pose.z_mm >= z_top - plan.max_descent_mm - 1e-9


def test_exclude_clamped_drops_out_of_window_points():
    terrain = make_mapping_terrain()
    keep = run_scan(GripperConfig(), bank(), terrain, ScanPlan(),
                    np.random.default_rng(5))
    drop = run_scan(GripperConfig(), bank(), terrain,
                    ScanPlan(include_clamped=False), np.random.default_rng(5))
    assert all(p.in_range for p in drop.points)
    assert len(drop.points) < len(keep.points)
    assert len(drop.points) == sum(p.in_range for p in keep.points)


def test_scan_is_reproducible_by_seed():
    terrain = make_mapping_terrain()
    a = run_scan(GripperConfig(), bank(), terrain, ScanPlan(), np.random.default_rng(9))
    b = run_scan(GripperConfig(), bank(), terrain, ScanPlan(), np.random.default_rng(9))
    assert a == b


def test_scan_rejects_stations_off_the_footprint():
    terrain = make_mapping_terrain()
    with pytest.raises(OutsideFootprintError):
        run_scan(GripperConfig(), bank(), terrain, ScanPlan(start_x_mm=-50.0, steps=1))


# -- export text ------------------------------------------------------------------


def small_cloud():
    return PointCloud(
        points=(point(1.25, 2.5, 30.0), point(11.0, 3.0, 28.5, step=1, j=2, k=3)),
        poses=(),
    )


def test_ply_header_and_rows():
    text = ply_text(small_cloud())
    lines = text.splitlines()
    assert lines[0] == "ply"
    assert lines[1] == "format ascii 1.0"
    assert lines[3] == "element vertex 2"
    assert lines[4:7] == ["property float x", "property float y", "property float z"]
    assert lines[7] == "end_header"
    assert lines[8] == "1.250000 2.500000 30.000000"
    assert len(lines) == 10
    assert text.endswith("\n")


def test_points_csv_rows():
    lines = points_csv_text(small_cloud()).splitlines()
    assert lines[0] == "step,j,k,x_mm,y_mm,z_mm"
    assert lines[1] == "0,1,1,1.250000,2.500000,30.000000"
    assert lines[2] == "1,2,3,11.000000,3.000000,28.500000"


def test_grid_and_summary_csv_round_numbers():
    truth = flat_field(25.0, width=20.0, depth=15.0)
    cloud = PointCloud(points=(point(2.0, 7.0, 26.0),), poses=())
    grid = bin_average(cloud, truth)
    lines = grid_csv_text(grid).splitlines()
    assert lines[0] == "col_x,col_y,mean_z_mm,n_samples,abs_err_mm"
    assert lines[1] == "5.000000,7.500000,26.000000,1,1.000000"
    assert summary_csv_text(grid) == "e_bar_mm\n1.000000\n"
