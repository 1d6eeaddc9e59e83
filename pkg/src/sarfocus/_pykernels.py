"""Pure-numpy fallback for the compiled kernels in ``_ckernels.pyx``.

Vectorised over pixels; the chirp and channel loops keep the same
ascending order as the compiled version.
"""

import numpy as np

SINC_HALF = 4


def _sample(g, v, interp):
    nbins = g.shape[0]
    v0 = np.floor(v).astype(np.int64)
    f = v - v0
    if interp == 0:
        a = g[v0 % nbins]
        b = g[(v0 + 1) % nbins]
        return (a.real * (1.0 - f) + b.real * f) + 1j * (a.imag * (1.0 - f) + b.imag * f)
    out = np.zeros(v.shape, dtype=complex)
    for j in range(-SINC_HALF + 1, SINC_HALF + 1):
        x = f - j
        w = np.sinc(x) * (0.5 + 0.5 * np.cos(np.pi * x / SINC_HALF))
        out += g[(v0 + j) % nbins] * w
    return out


def backproject(profiles, positions, xs, ys, z, dr, kref, interp=0, nthreads=1):
    nch, nc, nbins = profiles.shape
    rmax = nbins * dr
    X, Y = np.meshgrid(xs, ys)
    acc = np.zeros(X.shape, dtype=complex)
    bad = np.zeros(X.shape, dtype=bool)
    inv = 1.0 / nch
    for n in range(nc):
        ch = np.zeros(X.shape, dtype=complex)
        for v in range(nch):
            p = positions[v, n]
            r = np.sqrt((p[0] - X) ** 2 + (p[1] - Y) ** 2 + (p[2] - z) ** 2)
            out = r >= rmax
            bad |= out
            r = np.where(out, 0.0, r)
            ch += _sample(profiles[v, n], r / dr, interp) * np.exp(1j * kref * r)
        acc += ch * inv
    acc[bad] = 0.0
    return acc, int(bad.sum())


def interp_rows(xsrc, ysrc, xdst, cubic=True, nthreads=1):
    rows, m = xsrc.shape
    out = np.zeros(xdst.shape, dtype=complex)
    for row in range(rows):
        xs, ys, xq = xsrc[row], ysrc[row], xdst[row]
        inside = (xq >= xs[0]) & (xq <= xs[-1])
        if not inside.any():
            continue
        x = xq[inside]
        if m == 1:
            out[row, inside] = ys[0]
            continue
        lo = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, m - 2)
        if not cubic or m < 4:
            f = (x - xs[lo]) / (xs[lo + 1] - xs[lo])
            out[row, inside] = ys[lo] * (1.0 - f) + ys[lo + 1] * f
            continue
        s0 = np.clip(lo - 1, 0, m - 4)
        acc = np.zeros(x.shape, dtype=complex)
        for a in range(4):
            w = np.ones(x.shape)
            for b in range(4):
                if b != a:
                    w = w * (x - xs[s0 + b]) / (xs[s0 + a] - xs[s0 + b])
            acc = acc + w * ys[s0 + a]
        out[row, inside] = acc
    return out
