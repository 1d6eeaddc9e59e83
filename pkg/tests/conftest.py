import numpy as np
import pytest

from sarfocus import kernels
from sarfocus.geometry import C, RadarParams, Scene, Srp, Trajectory
from sarfocus.scenario import BpaGrid, ErrorModel, Scenario

# three scatterers within about a metre of the SRP
NEAR_SRP = (((0.0, 22.0, 0.0), 1.0), ((0.6, 22.3, 0.0), 0.7), ((-0.5, 21.6, 0.0), 0.5))


@pytest.fixture(autouse=True)
def _single_thread():
    kernels.set_threads(1)
    yield
    kernels.set_threads(1)


@pytest.fixture(scope="session")
def radar():
    return RadarParams()


@pytest.fixture(scope="session")
def srp():
    return Srp()


def long_aperture(beta=0.0, scene=NEAR_SRP, **radar_changes):
    """Default radar over 1024 chirps (1.16 m aperture), where the error defocuses."""
    return Scenario(
        radar=RadarParams(N_c=1024, **radar_changes),
        scene=Scene.from_points(scene),
        error=ErrorModel(beta_true=beta),
        bpa=BpaGrid(extent=(3.2, 3.2), shape=(128, 128)),
    )


def oracle_wavenumber(i, f_c=77.45e9, B=900.9e6, N_s=256, T_s=2e-7):
    # k(i) = 2 (omega_c + gamma * i * T_s) / c, written independently of the package
    gamma = 2 * np.pi * B / (N_s * T_s)
    return 2 * (2 * np.pi * f_c + gamma * np.asarray(i) * T_s) / C


def matched_filter_oracle(history, positions, xs, ys, z, radar):
    """Direct double sum ``sum_n sum_i s(n, i) exp(+j k(i) r_pn)`` per pixel."""
    k = oracle_wavenumber(np.arange(radar.N_s), radar.f_c, radar.B, radar.N_s, radar.T_s)
    image = np.zeros((ys.size, xs.size), dtype=complex)
    for iy, y in enumerate(ys):
        for ix, x in enumerate(xs):
            r = np.sqrt((positions[:, 0] - x) ** 2 + (positions[:, 1] - y) ** 2 + (positions[:, 2] - z) ** 2)
            image[iy, ix] = np.sum(history * np.exp(1j * np.outer(r, k)))
    return image


def measured(traj: Trajectory) -> Trajectory:
    return Trajectory(traj.positions, "measured")
