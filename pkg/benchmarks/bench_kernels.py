"""Compiled versus pure-Python kernels on the two hot loops.

    python3 benchmarks/bench_kernels.py [--grid 64] [--chirps 128] [--repeats 3]
"""

import argparse
import time

import numpy as np

from sarfocus import kernels
from sarfocus.bpa import ImageGrid, range_profiles
from sarfocus.fmcw import simulate_beat_cube
from sarfocus.geometry import RadarParams, Scene, Srp, Trajectory
from sarfocus.pfa import range_compensate, srp_beamform


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=64)
    ap.add_argument("--chirps", type=int, default=128)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    radar = RadarParams(N_c=args.chirps, N_v=1)
    traj = Trajectory.linear(radar)
    scene = Scene.from_points([((0.0, 22.0, 0.0), 1.0), ((0.8, 21.5, 0.0), 0.5)])
    cube = simulate_beat_cube(scene, traj, radar)
    prof = range_profiles(cube.data[0], radar)
    grid = ImageGrid.centered((0.0, 22.0), (3.2, 3.2), (args.grid, args.grid))
    hist = range_compensate(srp_beamform(cube, traj, Srp()), traj, Srp(), radar)
    ky = np.broadcast_to(np.linspace(hist.ky[:, 0].max(), hist.ky[:, -1].min(), radar.N_s), hist.ky.shape)

    print(f"backends: {kernels.available_backends()}")
    print(f"{'kernel':<14}{'backend':<10}{'seconds':>10}")
    results = {}
    for backend in kernels.available_backends():
        bp = best_of(lambda: kernels.backproject(
            prof.data[None], traj.positions[None], grid.x_axis, grid.y_axis, 0.0,
            prof.dr, prof.k_ref, 0, backend=backend), args.repeats)
        ip = best_of(lambda: kernels.interp_rows(hist.ky, hist.data, ky, True, backend=backend), args.repeats)
        results[backend] = (bp, ip)
        print(f"{'backproject':<14}{backend:<10}{bp:>10.4f}")
        print(f"{'interp_rows':<14}{backend:<10}{ip:>10.4f}")
    if "compiled" in results:
        c, p = results["compiled"], results["python"]
        print(f"speedup backproject x{p[0] / c[0]:.1f}, interp_rows x{p[1] / c[1]:.1f}")


if __name__ == "__main__":
    main()
