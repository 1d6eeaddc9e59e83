import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sarfocus.autofocus import (
    LecaConfig,
    PgaConfig,
    PhaseErrorEstimate,
    compensated_history,
    detrend,
    leca_estimate_beta,
    leca_on_history,
    pga_estimate_phase,
    phase_on_chirps,
    phase_to_beta,
)
from sarfocus.errors import ConfigError, GeometryError, OptimizationError, UndefinedMetricError
from sarfocus.geometry import RadarParams, Scene, Srp, Trajectory, aperture_geometry, wavenumbers
from sarfocus.image import SarImage
from sarfocus.metrics import image_contrast
from sarfocus.pfa import form_pfa
from sarfocus.scenario import Scenario

from conftest import long_aperture, measured

SINGLE = (((0.0, 22.0, 0.0), 1.0),)


def table_history(scenario=None):
    s = scenario or Scenario()
    cube = s.simulate()
    return compensated_history(cube, measured(s.true_trajectory()), s.srp)


@pytest.fixture(scope="module")
def hist():
    return table_history()


def inject(hist, phase):
    return hist.with_data(hist.data * np.exp(1j * phase)[:, None])


def rms(x):
    return float(np.sqrt(np.mean(np.square(x))))


class TestLeca:
    def test_recovers_beta_single_scatterer(self):
        s = long_aperture(5e-5, SINGLE)
        result = leca_estimate_beta(s.simulate(), s.measured_trajectory(), s.srp)
        assert abs(result.beta - 5e-5) / 5e-5 <= 0.10

    def test_zero_error_stays_at_origin(self):
        # a lone scatterer at the SRP: defocus is symmetric in beta
        hist = table_history(Scenario(scene=Scene.from_points(SINGLE)))
        result = leca_on_history(hist)
        assert abs(result.beta) <= 2 * LecaConfig().fd_step
        assert image_contrast(form_pfa(hist, result.beta)) >= image_contrast(form_pfa(hist, 0.0))

    @pytest.mark.parametrize("beta0", [-3e-5, 4e-5])
    def test_best_seen_contract(self, hist, beta0):
        cfg = LecaConfig(beta0=beta0, max_iter=8)
        result = leca_on_history(hist, cfg)
        trace = np.asarray(result.ic_trace)
        assert trace.size >= 1
        assert np.all(np.diff(np.maximum.accumulate(trace)) >= 0)
        final = image_contrast(form_pfa(hist, result.beta))
        assert final == pytest.approx(trace.max(), rel=1e-12)
        assert final >= image_contrast(form_pfa(hist, beta0))

    @pytest.mark.parametrize("c", [4.0, 0.37])
    def test_reflectivity_scale_invariance(self, hist, c):
        base = leca_on_history(hist, LecaConfig(beta0=2e-5, max_iter=6))
        scaled = leca_on_history(hist.with_data(hist.data * c), LecaConfig(beta0=2e-5, max_iter=6))
        assert scaled.beta == pytest.approx(base.beta, rel=1e-6, abs=1e-12)

    def test_roi_restricts_contrast(self, hist):
        result = leca_on_history(hist, LecaConfig(max_iter=3), roi=(-1, 1, -1, 1))
        assert np.isfinite(result.beta)
        with pytest.raises(ConfigError):
            leca_on_history(hist, roi=(100, 101, 0, 1))

    def test_degenerate_image(self, hist):
        with pytest.raises(OptimizationError):
            leca_on_history(hist.with_data(np.zeros_like(hist.data)))

    def test_rejects_true_trajectory(self):
        s = Scenario()
        with pytest.raises(ConfigError):
            leca_estimate_beta(s.simulate(), s.true_trajectory(), s.srp)

    @pytest.mark.parametrize("bad", [dict(rho=0.0), dict(delta_ic=-1), dict(max_iter=0),
                                     dict(fd_step=0.0), dict(beta0=np.nan), dict(growth=0.5)])
    def test_config_validation(self, bad):
        with pytest.raises(ConfigError):
            LecaConfig(**bad)


class TestPga:
    def test_quadratic_phase(self, hist):
        n = np.arange(hist.data.shape[0])
        c = (n.size - 1) / 2
        injected = 3.0 / c**2 * (n - c) ** 2
        image = form_pfa(inject(hist, injected))
        est = phase_on_chirps(pga_estimate_phase(image), image, hist.geometry)
        assert rms(detrend(est.eps_phi) - detrend(injected)) <= 0.1

    def test_no_error(self, hist):
        image = form_pfa(hist)
        est = phase_on_chirps(pga_estimate_phase(image), image, hist.geometry)
        assert rms(detrend(est.eps_phi)) <= 0.05

    def test_cubic_phase(self, hist):
        n = np.arange(hist.data.shape[0])
        injected = 0.5 * (n / n.size) ** 3 * 2 * np.pi
        image = form_pfa(inject(hist, injected))
        est = phase_on_chirps(pga_estimate_phase(image), image, hist.geometry)
        assert rms(detrend(est.eps_phi) - detrend(injected)) <= 0.15

    def test_energy_preserved(self, hist):
        n = np.arange(hist.data.shape[0])
        image = form_pfa(inject(hist, 2e-4 * (n - 60) ** 2))
        corrected = pga_estimate_phase(image).corrected
        assert np.sum(corrected.intensity) == pytest.approx(np.sum(image.intensity), rel=1e-9)
        assert corrected.meta["autofocus"] == "pga"

    def test_poly_is_least_squares_fit(self, hist):
        est = pga_estimate_phase(form_pfa(hist))
        q2, q1, q0 = np.polyfit(est.n, est.eps_phi, 2)
        np.testing.assert_allclose(est.poly, (q0, q1, q2), rtol=1e-9, atol=1e-12)
        assert est.rms_residual >= 0

    def test_too_many_rows(self):
        image = SarImage(np.ones((8, 16), complex), np.arange(16.0), np.arange(8.0))
        with pytest.raises(ConfigError):
            pga_estimate_phase(image, PgaConfig(J=9))

    def test_all_zero_image(self):
        image = SarImage(np.zeros((40, 16), complex), np.arange(16.0), np.arange(40.0))
        with pytest.raises(UndefinedMetricError):
            pga_estimate_phase(image)

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            PgaConfig(J=0)
        with pytest.raises(ConfigError):
            PgaConfig(window0=4, min_window=8)


@pytest.fixture(scope="module")
def geometry():
    return aperture_geometry(Trajectory.linear(RadarParams()), Srp())


class TestPhaseToBeta:
    @staticmethod
    def exact(beta, geometry, radar=RadarParams()):
        n = np.arange(geometry.alpha.size, dtype=float)
        rate = np.polyfit(n, np.sin(geometry.alpha), 1)[0]
        return PhaseErrorEstimate.fit(np.mean(wavenumbers(radar)) * rate * beta * n**2)

    def test_inverts_defining_formula(self, geometry):
        beta = phase_to_beta(self.exact(1e-4, geometry), geometry, RadarParams())
        assert beta == pytest.approx(1e-4, abs=1e-10)

    def test_zero_curvature(self, geometry):
        est = PhaseErrorEstimate.fit(0.3 + 0.01 * np.arange(128.0))
        assert phase_to_beta(est, geometry, RadarParams()) == pytest.approx(0.0, abs=1e-15)

    @given(c=st.floats(-50, 50).filter(lambda c: abs(c) > 1e-3))
    def test_homogeneous(self, geometry, c):
        est = self.exact(1e-4, geometry)
        scaled = PhaseErrorEstimate.fit(c * est.eps_phi)
        radar = RadarParams()
        assert phase_to_beta(scaled, geometry, radar) == pytest.approx(
            c * phase_to_beta(est, geometry, radar), rel=1e-9)

    def test_stationary_geometry(self):
        still = Trajectory(np.zeros((128, 3)), "measured")
        g = aperture_geometry(still, Srp())
        with pytest.raises(GeometryError):
            phase_to_beta(PhaseErrorEstimate.fit(np.arange(128.0) ** 2), g, RadarParams())

    def test_sign_of_recovered_curvature(self):
        s = long_aperture(1e-4)
        hist = compensated_history(s.simulate(), s.measured_trajectory(), s.srp)
        image = form_pfa(hist)
        est = phase_on_chirps(pga_estimate_phase(image), image, hist.geometry)
        k_mean = np.mean(hist.k)
        n = np.arange(hist.geometry.alpha.size)
        rate = np.polyfit(n, np.sin(hist.geometry.alpha), 1)[0]
        # forward motion sweeps the squint down, so the curvature is negative here
        assert rate < 0
        assert np.sign(est.poly[2]) == np.sign(k_mean * rate * 1e-4)
        beta = phase_to_beta(est, hist.geometry, s.radar)
        assert beta == pytest.approx(1e-4, rel=0.1)
