import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sarfocus.bpa import (
    ImageGrid,
    backproject,
    correct_trajectory,
    pixelwise_bf_backproject,
    pre_bpa_beamform,
    range_profiles,
)
from sarfocus.errors import ConfigError
from sarfocus.fmcw import BeatCube, simulate_beat_cube
from sarfocus.geometry import RadarParams, Scene, Trajectory, inject_linear_error
from sarfocus.metrics import azimuth_resolution, image_contrast

from conftest import matched_filter_oracle, measured

SMALL = RadarParams(N_c=48, N_s=64, B=225e6)


def point(x, y, sigma=1.0):
    return Scene.from_points([((x, y, 0.0), sigma)])


def siso(scene, radar, grid, traj=None, nav=None, zero_pad=4, interp="linear"):
    traj = traj or Trajectory.linear(radar)
    cube = simulate_beat_cube(scene, traj, radar.replace(N_v=1))
    profiles = range_profiles(cube.data[0], radar, zero_pad)
    return backproject(profiles, nav or measured(traj), grid, radar, interp)


class TestRangeProfiles:
    def test_zero(self, radar):
        p = range_profiles(np.zeros((radar.N_c, radar.N_s)), radar)
        assert not np.any(p.data)

    @pytest.mark.parametrize("zero_pad", [1, 4])
    def test_bin_pitch(self, radar, zero_pad):
        p = range_profiles(np.zeros((2, radar.N_s)), radar, zero_pad)
        assert p.n_bins == radar.N_s * zero_pad
        assert p.dr == pytest.approx(radar.r_max / p.n_bins)

    @pytest.mark.parametrize("r", [10.0, 17.77, 33.3])
    def test_static_scatterer_bin(self, radar, r):
        one = radar.replace(N_v=1, N_c=2)
        cube = simulate_beat_cube(point(0, r), Trajectory(np.zeros((2, 3)), "true"), one)
        p = range_profiles(cube.data[0], one)
        # brute-force DFT of the same samples as oracle
        i = np.arange(one.N_s)
        v = np.arange(p.n_bins)
        dft = np.exp(2j * np.pi * np.outer(v, i) / p.n_bins) @ cube.data[0, 0]
        assert np.argmax(np.abs(p.data[0])) == np.argmax(np.abs(dft)) == round(r / p.dr)

    def test_two_scatterers_resolved(self, radar):
        one = radar.replace(N_v=1, N_c=2)
        sc = Scene.from_points([((0, 15.0, 0), 1.0), ((0, 15.4, 0), 1.0)])
        cube = simulate_beat_cube(sc, Trajectory(np.zeros((2, 3)), "true"), one)
        mag = np.abs(range_profiles(cube.data[0], one).data[0])
        b1, b2 = round(15.0 / (one.r_max / 1024)), round(15.4 / (one.r_max / 1024))
        dip = mag[b1:b2 + 1].min()
        assert mag[b1 - 2:b1 + 3].max() > 2 * dip and mag[b2 - 2:b2 + 3].max() > 2 * dip

    def test_sample_count_checked(self, radar):
        with pytest.raises(ConfigError):
            range_profiles(np.zeros((2, 100)), radar)


class TestBackproject:
    def test_zero(self, radar):
        grid = ImageGrid.centered((0, 22), (1, 1), (8, 8))
        p = range_profiles(np.zeros((radar.N_c, radar.N_s)), radar)
        image = backproject(p, measured(Trajectory.linear(radar)), grid, radar)
        assert not np.any(image.pixels)

    def test_matches_matched_filter_oracle(self):
        radar = RadarParams(N_v=1, N_c=64)
        traj = Trajectory.linear(radar)
        sc = point(0.2, 21.9)
        grid = ImageGrid.centered((0.2, 21.9), (1.6, 1.6), (32, 32))
        image = siso(sc, radar, grid, traj)
        cube = simulate_beat_cube(sc, traj, radar)
        oracle = matched_filter_oracle(cube.data[0], traj.positions, grid.x_axis, grid.y_axis, 0.0, radar)
        assert image.peak() == np.unravel_index(np.argmax(np.abs(oracle)), oracle.shape)
        a, b = np.abs(image.pixels), np.abs(oracle)
        assert a.max() == pytest.approx(b.max(), rel=0.03)
        assert np.max(np.abs(a / a.max() - b / b.max())) < 0.03

    def test_sinc_interpolation_also_matches(self):
        radar = RadarParams(N_v=1, N_c=32)
        traj = Trajectory.linear(radar)
        grid = ImageGrid.centered((0, 22), (1.3, 1.3), (13, 13))
        lin = siso(point(0, 22), radar, grid, traj)
        sinc = siso(point(0, 22), radar, grid, traj, interp="sinc")
        assert lin.peak() == sinc.peak()
        assert np.abs(sinc.pixels).max() == pytest.approx(np.abs(lin.pixels).max(), rel=0.03)

    def test_pixels_beyond_unambiguous_range_excluded(self, radar):
        grid = ImageGrid.centered((0, 42.0), (1, 2), (8, 8))
        image = siso(point(0, 22), radar, grid)
        far = grid.y_axis[:, None] + 0 * grid.x_axis[None, :] >= radar.r_max - 0.1
        assert image.meta["excluded_pixels"] >= far.sum() > 0
        assert not np.any(image.pixels[far])

    @settings(max_examples=10, deadline=None)
    @given(a=st.tuples(st.floats(-0.5, 0.5), st.floats(21.5, 22.5)),
           b=st.tuples(st.floats(-0.5, 0.5), st.floats(21.5, 22.5)))
    def test_superposition(self, a, b):
        grid = ImageGrid.centered((0, 22), (1.2, 1.2), (16, 16))
        A, B = point(*a), point(*b, 0.6)
        both = siso(A | B, SMALL, grid).pixels
        apart = siso(A, SMALL, grid).pixels + siso(B, SMALL, grid).pixels
        np.testing.assert_allclose(both, apart, rtol=1e-9, atol=1e-9 * np.abs(both).max())

    def test_correction_sharpens(self):
        radar = RadarParams(N_v=1, N_c=512)
        traj = Trajectory.linear(radar)
        grid = ImageGrid.centered((0, 22), (1.6, 1.6), (64, 64))
        nav = inject_linear_error(traj, 5e-5)
        blurred = siso(point(0, 22), radar, grid, traj, nav)
        fixed = siso(point(0, 22), radar, grid, traj, correct_trajectory(nav, 5e-5))
        assert image_contrast(fixed) > image_contrast(blurred)
        assert azimuth_resolution(fixed, 1).mean < azimuth_resolution(blurred, 1).mean

    def test_length_mismatch(self, radar):
        p = range_profiles(np.zeros((4, radar.N_s)), radar)
        grid = ImageGrid.centered((0, 22), (1, 1), (4, 4))
        with pytest.raises(ConfigError):
            backproject(p, measured(Trajectory.linear(radar)), grid, radar)


class TestBeamforming:
    def test_pre_bf_average(self, radar):
        flat = radar.replace(d_v=0.0)
        cube = simulate_beat_cube(point(0, 22), Trajectory.linear(flat), flat)
        np.testing.assert_allclose(pre_bpa_beamform(cube), cube.data[2], rtol=1e-15)

    def test_pre_bf_single_channel(self, radar):
        one = radar.replace(N_v=1)
        cube = simulate_beat_cube(point(0, 22), Trajectory.linear(one), one)
        np.testing.assert_array_equal(pre_bpa_beamform(cube), cube.data[0])

    def test_pre_bf_noise_power(self, radar):
        radar = radar.replace(N_c=512)
        rng = np.random.default_rng(8)
        shape = (radar.N_v, radar.N_c, radar.N_s)
        noise = BeatCube(rng.standard_normal(shape) + 1j * rng.standard_normal(shape), radar)
        assert radar.N_c * radar.N_s >= 1e5
        out = np.mean(np.abs(pre_bpa_beamform(noise)) ** 2)
        assert out == pytest.approx(np.mean(np.abs(noise.data[0]) ** 2) / radar.N_v, rel=0.05)

    def test_pixelwise_single_channel_equals_siso(self):
        one = SMALL.replace(N_v=1)
        traj = Trajectory.linear(one)
        grid = ImageGrid.centered((0, 22), (1.2, 1.2), (12, 12))
        cube = simulate_beat_cube(point(0.1, 22), traj, one)
        a = pixelwise_bf_backproject(cube, measured(traj), grid, one).pixels
        b = backproject(range_profiles(cube.data[0], one), measured(traj), grid, one).pixels
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12 * np.abs(b).max())

    def test_pixelwise_without_spacing_equals_pre_bf(self):
        flat = SMALL.replace(d_v=0.0)
        traj = Trajectory.linear(flat)
        grid = ImageGrid.centered((0, 22), (1.2, 1.2), (12, 12))
        cube = simulate_beat_cube(point(0.1, 22), traj, flat)
        a = pixelwise_bf_backproject(cube, measured(traj), grid, flat).pixels
        b = backproject(range_profiles(pre_bpa_beamform(cube), flat), measured(traj), grid, flat).pixels
        np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-9 * np.abs(b).max())

    def test_pixelwise_keeps_off_boresight_gain(self):
        radar = SMALL
        traj = Trajectory.linear(radar)
        r, theta = 15.0, np.radians(30)
        x, y = r * np.sin(theta), r * np.cos(theta)
        cube = simulate_beat_cube(point(x, y), traj, radar)
        grid = ImageGrid.centered((x, y), (1.6, 1.6), (16, 16))
        pixelwise = pixelwise_bf_backproject(cube, measured(traj), grid, radar)
        pre = backproject(range_profiles(pre_bpa_beamform(cube), radar), measured(traj), grid, radar)
        assert np.abs(pixelwise.pixels).max() >= np.abs(pre.pixels).max()
        assert np.abs(pixelwise.pixels).max() > 2 * np.abs(pre.pixels).max()


class TestCorrectTrajectory:
    def test_zero(self, radar):
        nav = measured(Trajectory.linear(radar))
        np.testing.assert_array_equal(correct_trajectory(nav, 0.0).positions, nav.positions)

    @given(beta=st.floats(-1e-3, 1e-3))
    def test_halves_add_up(self, beta):
        nav = inject_linear_error(Trajectory.linear(SMALL), 3e-5)
        twice = correct_trajectory(correct_trajectory(nav, beta / 2), beta / 2)
        once = correct_trajectory(nav, beta)
        np.testing.assert_allclose(twice.positions, once.positions, rtol=0, atol=1e-15)
        assert twice.label == "corrected"

    def test_rejects_true_trajectory(self, radar):
        with pytest.raises(ConfigError):
            correct_trajectory(Trajectory.linear(radar), 1e-5)


def test_image_grid_validation():
    with pytest.raises(ConfigError):
        ImageGrid(np.array([0.0, 1.0, 3.0]), np.array([1.0, 2.0]))
    g = ImageGrid.centered((1, 20), (2, 4), (8, 4))
    assert g.shape == (8, 4)
    assert g.x_axis.mean() == pytest.approx(1) and g.y_axis.mean() == pytest.approx(20)
