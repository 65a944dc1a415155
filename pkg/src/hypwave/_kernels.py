"""Numba kernels for the radial method-of-lines evolution.

Grid: r_j = j h, fields even through the axis (w[-j] = w[j]); beyond the
active window [0, n) everything is maintained identically zero, so the
stencils may read three nodes past n.  Spatial derivatives are 6th-order
centered; the radial Laplacian w_rr + (2/r) w_r degenerates to 3 w_rr at
the axis.  Dissipation is the 7-point sixth-difference filter scaled by
sigma/(64 h_t), tapered off near the support edge so it never widens the
compact support.

The hot loops are branch-free and stride-1 so they vectorize; edge nodes
are patched separately.
"""

import numba
import numpy as np

_RAMP = 16  # dissipation fades over this many nodes before n_damp

# 6th-order derivative weights, folded for symmetry: offsets 1..3 and center
_A1, _A2, _A3 = 45.0 / 60.0, -9.0 / 60.0, 1.0 / 60.0
_B0, _B1, _B2, _B3 = -490.0 / 180.0, 270.0 / 180.0, -27.0 / 180.0, 2.0 / 180.0


@numba.njit(cache=True, fastmath=False)
def _d1_edges(wi, inv_h):
    """First derivative at j = 0, 1, 2 with even parity."""
    e0 = 0.0
    e1 = (-_A3 * wi[2] - _A2 * wi[1] - _A1 * wi[0]
          + _A1 * wi[2] + _A2 * wi[3] + _A3 * wi[4]) * inv_h
    e2 = (-_A3 * wi[1] - _A2 * wi[0] - _A1 * wi[1]
          + _A1 * wi[3] + _A2 * wi[4] + _A3 * wi[5]) * inv_h
    return e0, e1, e2


@numba.njit(cache=True, fastmath=False)
def _lap_edges(wi, inv_h, inv_h2, inv_r):
    d2_0 = (_B0 * wi[0] + 2.0 * _B1 * wi[1] + 2.0 * _B2 * wi[2]
            + 2.0 * _B3 * wi[3]) * inv_h2
    l0 = 3.0 * d2_0
    d2_1 = (_B3 * wi[2] + _B2 * wi[1] + _B1 * wi[0] + _B0 * wi[1]
            + _B1 * wi[2] + _B2 * wi[3] + _B3 * wi[4]) * inv_h2
    d2_2 = (_B3 * wi[1] + _B2 * wi[0] + _B1 * wi[1] + _B0 * wi[2]
            + _B1 * wi[3] + _B2 * wi[4] + _B3 * wi[5]) * inv_h2
    e0, e1, e2 = _d1_edges(wi, inv_h)
    l1 = d2_1 + 2.0 * e1 * inv_r[1]
    l2 = d2_2 + 2.0 * e2 * inv_r[2]
    return l0, l1, l2


@numba.njit(cache=True, fastmath=False)
def _stage(w, wt, h, n, inv_r, masses2, ptt, pxx, qt, rc, has_f, sig, n_damp,
           dw, da, wr):
    """One right-hand-side evaluation: dw = wt - diss(w),
    da = Lap w - D^2 w + F(w, wt, w_r) - diss(wt)."""
    nc = w.shape[0]
    inv_h = 1.0 / h
    inv_h2 = inv_h * inv_h
    for i in range(nc):
        wi = w[i]
        wti = wt[i]
        dai = da[i]
        dwi = dw[i]
        m2 = masses2[i]
        for j in range(3, n):
            d2 = (_B0 * wi[j] + _B1 * (wi[j - 1] + wi[j + 1])
                  + _B2 * (wi[j - 2] + wi[j + 2])
                  + _B3 * (wi[j - 3] + wi[j + 3])) * inv_h2
            d1 = (_A1 * (wi[j + 1] - wi[j - 1]) + _A2 * (wi[j + 2] - wi[j - 2])
                  + _A3 * (wi[j + 3] - wi[j - 3])) * inv_h
            dai[j] = d2 + 2.0 * d1 * inv_r[j] - m2 * wi[j]
            dwi[j] = wti[j]
        if n > 0:
            l0, l1, l2 = _lap_edges(wi, inv_h, inv_h2, inv_r)
            dai[0] = l0 - m2 * wi[0]
            dwi[0] = wti[0]
            if n > 1:
                dai[1] = l1 - m2 * wi[1]
                dwi[1] = wti[1]
            if n > 2:
                dai[2] = l2 - m2 * wi[2]
                dwi[2] = wti[2]

    if has_f:
        for i in range(nc):
            wi = w[i]
            wri = wr[i]
            for j in range(3, n):
                wri[j] = (_A1 * (wi[j + 1] - wi[j - 1]) + _A2 * (wi[j + 2] - wi[j - 2])
                          + _A3 * (wi[j + 3] - wi[j - 3])) * inv_h
            if n > 0:
                e0, e1, e2 = _d1_edges(wi, inv_h)
                wri[0] = e0
                if n > 1:
                    wri[1] = e1
                if n > 2:
                    wri[2] = e2
        for i in range(nc):
            dai = da[i]
            for jj in range(nc):
                for kk in range(nc):
                    c_tt = ptt[i, jj, kk]
                    c_xx = pxx[i, jj, kk]
                    c_q = qt[i, jj, kk]
                    c_r = rc[i, jj, kk]
                    if c_tt == 0.0 and c_xx == 0.0 and c_q == 0.0 and c_r == 0.0:
                        continue
                    wtj = wt[jj]
                    wtk = wt[kk]
                    wrj = wr[jj]
                    wrk = wr[kk]
                    wj = w[jj]
                    wk = w[kk]
                    for j in range(n):
                        dai[j] += (c_tt * wtj[j] * wtk[j] + c_xx * wrj[j] * wrk[j]
                                   + c_q * wk[j] * wtj[j] + c_r * wj[j] * wk[j])

    if sig != 0.0 and n_damp > 0:
        # the sixth difference has symbol -(2 sin(kh/2))^6, so adding it
        # with a positive factor damps
        flat = min(n_damp - _RAMP, n)
        for i in range(nc):
            for arr, out in ((w[i], dw[i]), (wt[i], da[i])):
                for j in range(3, flat):
                    out[j] += sig * (arr[j - 3] - 6.0 * arr[j - 2] + 15.0 * arr[j - 1]
                                     - 20.0 * arr[j] + 15.0 * arr[j + 1]
                                     - 6.0 * arr[j + 2] + arr[j + 3])
                for j in range(max(3, flat), min(n_damp, n)):
                    f = sig * (n_damp - j) / _RAMP
                    out[j] += f * (arr[j - 3] - 6.0 * arr[j - 2] + 15.0 * arr[j - 1]
                                   - 20.0 * arr[j] + 15.0 * arr[j + 1]
                                   - 6.0 * arr[j + 2] + arr[j + 3])
                if flat > 0:
                    out[0] += sig * (-20.0 * arr[0] + 30.0 * arr[1] - 12.0 * arr[2]
                                     + 2.0 * arr[3])
                if flat > 1:
                    out[1] += sig * (arr[2] - 6.0 * arr[1] + 15.0 * arr[0]
                                     - 20.0 * arr[1] + 15.0 * arr[2] - 6.0 * arr[3]
                                     + arr[4])
                if flat > 2:
                    out[2] += sig * (arr[1] - 6.0 * arr[0] + 15.0 * arr[1]
                                     - 20.0 * arr[2] + 15.0 * arr[3] - 6.0 * arr[4]
                                     + arr[5])


@numba.njit(cache=True, fastmath=False)
def lap_all(w, h, n, inv_r, out):
    """Radial Laplacian of every component (same stencils as _stage)."""
    nc = w.shape[0]
    inv_h = 1.0 / h
    inv_h2 = inv_h * inv_h
    for i in range(nc):
        wi = w[i]
        oi = out[i]
        for j in range(3, n):
            d2 = (_B0 * wi[j] + _B1 * (wi[j - 1] + wi[j + 1])
                  + _B2 * (wi[j - 2] + wi[j + 2])
                  + _B3 * (wi[j - 3] + wi[j + 3])) * inv_h2
            d1 = (_A1 * (wi[j + 1] - wi[j - 1]) + _A2 * (wi[j + 2] - wi[j - 2])
                  + _A3 * (wi[j + 3] - wi[j - 3])) * inv_h
            oi[j] = d2 + 2.0 * d1 * inv_r[j]
        if n > 0:
            l0, l1, l2 = _lap_edges(wi, inv_h, inv_h2, inv_r)
            oi[0] = l0
            if n > 1:
                oi[1] = l1
            if n > 2:
                oi[2] = l2


@numba.njit(cache=True, fastmath=False)
def _axpy2(out1, a1, b1, out2, a2, b2, c, n):
    for i in range(out1.shape[0]):
        for j in range(n):
            out1[i, j] = a1[i, j] + c * b1[i, j]
            out2[i, j] = a2[i, j] + c * b2[i, j]


@numba.njit(cache=True, fastmath=False)
def _fold_and_final(w, wt, k1w, k1a, k2w, k2a, k3w, k3a, k4w, k4a, c, n):
    for i in range(w.shape[0]):
        for j in range(n):
            w[i, j] += c * (k1w[i, j] + 2.0 * (k2w[i, j] + k3w[i, j]) + k4w[i, j])
            wt[i, j] += c * (k1a[i, j] + 2.0 * (k2a[i, j] + k3a[i, j]) + k4a[i, j])


def rhs_semilinear(w, wt, h, n, inv_r, masses2, ptt, pxx, qt, rc, has_f, sig,
                   n_damp, dw, da, wr=None):
    if wr is None:
        wr = np.empty_like(w)
    _stage(w, wt, h, n, inv_r, masses2, ptt, pxx, qt, rc, has_f, sig, n_damp,
           dw, da, wr)


def rk4_step_semilinear(w, wt, ht, h, n, inv_r, masses2, ptt, pxx, qt, rc, has_f,
                        sig, n_damp, ws):
    """Classical four-stage step in place; ws is a (11, nc, nr) workspace.
    On return ws[0], ws[1] hold the stage-one rhs at the pre-step state
    (the level's time-derivative data for slice interpolation)."""
    k1w, k1a, k2w, k2a, k3w, k3a, k4w, k4a, tw, twt, wr = ws
    _stage(w, wt, h, n, inv_r, masses2, ptt, pxx, qt, rc, has_f, sig, n_damp,
           k1w, k1a, wr)
    _axpy2(tw, w, k1w, twt, wt, k1a, 0.5 * ht, n)
    _stage(tw, twt, h, n, inv_r, masses2, ptt, pxx, qt, rc, has_f, sig, n_damp,
           k2w, k2a, wr)
    _axpy2(tw, w, k2w, twt, wt, k2a, 0.5 * ht, n)
    _stage(tw, twt, h, n, inv_r, masses2, ptt, pxx, qt, rc, has_f, sig, n_damp,
           k3w, k3a, wr)
    _axpy2(tw, w, k3w, twt, wt, k3a, ht, n)
    _stage(tw, twt, h, n, inv_r, masses2, ptt, pxx, qt, rc, has_f, sig, n_damp,
           k4w, k4a, wr)
    _fold_and_final(w, wt, k1w, k1a, k2w, k2a, k3w, k3a, k4w, k4a, ht / 6.0, n)


@numba.njit(cache=True, fastmath=False)
def max_abs(w, n):
    m = 0.0
    for i in range(w.shape[0]):
        for j in range(n):
            v = abs(w[i, j])
            if v > m:
                m = v
    return m
