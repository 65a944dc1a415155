"""Slice geometry, quadrature and extraction."""

import numpy as np
import pytest
import sympy as sp

from hypwave import hypergeom as hg
from hypwave.hypergeom import (
    Slice,
    SliceExtractor,
    in_cone,
    integrate,
    lift,
    slice_data_from_expression,
    slice_support,
    t_max,
    to_slice,
)


def test_lift_examples():
    assert lift(1.0, 0.0) == 1.0
    assert lift(3.0, 4.0) == pytest.approx(5.0, rel=1e-15)
    with pytest.raises(ValueError):
        lift(0.0, 1.0)
    with pytest.raises(ValueError):
        lift(-1.0, 1.0)


def test_cone_membership():
    # (s=2, r=2): t = sqrt(8) and r > t - 1, so the point is outside
    t = lift(2.0, 2.0)
    assert not in_cone(t, 2.0)
    assert in_cone(5.0, 4.0)


def test_slice_support_values():
    assert slice_support(1.0) == 0.0
    assert slice_support(3.0) == 4.0
    assert t_max(3.0) == 5.0
    assert slice_support(5.0) == 12.0
    assert t_max(5.0) == 13.0
    with pytest.raises(ValueError):
        slice_support(0.5)


def test_slice_support_monotone_and_consistent():
    s = np.linspace(1.0, 9.0, 40)
    r = np.array([slice_support(x) for x in s])
    assert np.all(np.diff(r) > 0)
    for sv in (2.0, 3.5, 7.0):
        assert t_max(sv) == pytest.approx(lift(sv, slice_support(sv)), rel=1e-15)


def test_slice_nodes_satisfy_hyperboloid_relation():
    slc = Slice.build(6.0, 0.01)
    res = np.max(np.abs(slc.t**2 - slc.r**2 - 36.0) / slc.t**2)
    assert res <= 4 * np.finfo(float).eps
    assert np.all(slc.r <= slc.t - 1.0 + 1e-12)
    assert np.all((slc.weight > 0) & (slc.weight <= 1.0))


def test_integrate_zero_and_linearity():
    slc = Slice.build(4.0, 0.01)
    z = np.zeros(slc.n_nodes())
    assert integrate(slc, z) == 0.0
    f = np.exp(-slc.r)
    g = np.cos(slc.r)
    a, b = 0.7, -1.3
    assert integrate(slc, a * f + b * g) == pytest.approx(
        a * integrate(slc, f) + b * integrate(slc, g), rel=1e-14)
    assert integrate(slc, f) > 0.0


def test_integrate_gaussian_closed_form():
    # 4 pi int r^2 exp(-r^2) dr = pi^(3/2)
    slc = Slice.build(4.0, 0.005)  # r_max = 7.5 well past the Gaussian tail
    val = integrate(slc, np.exp(-slc.r**2))
    assert val == pytest.approx(np.pi**1.5, rel=1e-4)


def test_integrate_self_convergence():
    ref = integrate(Slice.build(4.0, 0.0005), np.exp(-Slice.build(4.0, 0.0005).r**2))
    coarse = integrate(Slice.build(4.0, 0.01), np.exp(-Slice.build(4.0, 0.01).r**2))
    assert abs(coarse - ref) / ref < 1e-5


def test_empty_slice_warns():
    slc = Slice.build(1.0, 0.1)  # single node at the tip
    with pytest.warns(RuntimeWarning):
        assert integrate(Slice(1.0, 0.1, np.array([]), np.array([]),
                               np.array([]), np.array([])), np.array([])) == 0.0
    assert slc.n_nodes() == 1


def test_slice_derivative_fits_exact_on_polynomials():
    slc = Slice.build(5.0, 0.01)
    hw = hg.slice_filter_halfwidth(slc)
    vals = 2.0 + 3.0 * slc.r**2 - 0.25 * slc.r**4
    v, d1, d2, d3 = hg.slice_derivatives(vals, 1, hw, slc.h_r, 3)
    scale = np.max(np.abs(vals))
    assert np.max(np.abs(v - vals)) < 1e-10 * scale
    assert np.max(np.abs(d1 - (6.0 * slc.r - slc.r**3))) < 1e-8 * scale
    assert np.max(np.abs(d2 - (6.0 - 3.0 * slc.r**2))) < 1e-6 * scale
    assert np.max(np.abs(d3 - (-6.0 * slc.r))) < 1e-4 * scale


def test_analytic_slice_constant_field():
    slc = Slice.build(3.0, 0.02)
    sd = slice_data_from_expression(slc, "7.5", max_order=2)
    f = sd.component(0)
    assert np.allclose(f[""].g, 7.5)
    for word in ("t", "x", "H", "tt", "HH"):
        fld = f[word]
        arrs = [fld.g, fld.gt, fld.gr] if hasattr(fld, "g") else [fld.g2, fld.g0]
        for a in arrs:
            assert np.max(np.abs(a)) == 0.0


def test_analytic_slice_invariant_field():
    # u = t^2 - r^2 equals s^2 on the slice and is annihilated by the boost
    slc = Slice.build(4.0, 0.02)
    sd = slice_data_from_expression(slc, "t**2 - r**2", max_order=2)
    f = sd.component(0)
    assert np.allclose(f[""].g, 16.0, atol=1e-10)
    lu = slc.r * f["t"].g + slc.t * f["x"].g  # r u_t + t u_r
    assert np.max(np.abs(lu)) < 1e-10
    assert np.max(np.abs(f["H"].g)) < 1e-10


class _AnalyticHistory:
    """Uniform level storage filled from a closed form (for to_slice)."""

    def __init__(self, expr, t0, t1, h_t, h_r, r_domain):
        t, r = sp.symbols("t r")
        u = sp.sympify(expr)
        self.fns = [sp.lambdify((t, r), e, "numpy")
                    for e in (u, u.diff(t), u.diff(t, 2))]
        self.h_r = h_r
        self.n_components = 1
        self._times = np.arange(t0, t1 + h_t / 2, h_t)
        self._r = np.arange(0.0, r_domain, h_r)
        self.masses2 = None
        self.source_jet = None

    def times(self):
        return self._times

    def level(self, k):
        tv = self._times[k]
        out = []
        for f in self.fns:
            arr = np.asarray(f(tv, self._r), dtype=float)
            arr = np.broadcast_to(arr, self._r.shape).copy()
            out.append(arr[None, :])
        return (tv, out[0], out[1], out[2])


def test_to_slice_polynomial_field_is_exact():
    hist = _AnalyticHistory("t**2 - r**2 + 0.5*t*r**2", 3.0, 14.0, 0.05, 0.02, 14.0)
    sd = to_slice(hist, 3.0, max_deriv_order=2)
    slc = sd.slice
    sd_ref = slice_data_from_expression(slc, "t**2 - r**2 + 0.5*t*r**2", max_order=2)
    for word in ("", "t", "x", "H", "tt", "xx", "HH"):
        fn, fe = sd.fields[0][word], sd_ref.fields[0][word]
        names = ("g", "gt", "gr") if hasattr(fn, "g") else ("g2", "g0", "g2t", "g2r")
        for nm in names:
            a, b = getattr(fn, nm), getattr(fe, nm)
            scale = max(1.0, np.max(np.abs(b)))
            # third-derivative weights amplify round-off by ~1/(mh)^3
            assert np.max(np.abs(a - b)) / scale < 1e-5, (word, nm)


def test_to_slice_smooth_field_converges():
    # even in r: radial profiles of 3D fields always are
    expr = "exp(-(r**2-4)**2/8) * sin(t/2)"
    errs = []
    for h_r in (0.04, 0.02):
        hist = _AnalyticHistory(expr, 3.0, 14.0, h_r / 2, h_r, 14.0)
        sd = to_slice(hist, 3.0, max_deriv_order=2)
        ref = slice_data_from_expression(sd.slice, expr, max_order=2)
        e = np.max(np.abs(sd.fields[0]["H"].gr - ref.fields[0]["H"].gr))
        errs.append(e)
    assert errs[1] < errs[0] * 0.3


def test_to_slice_insufficient_history():
    hist = _AnalyticHistory("t*r**2", 3.0, 4.0, 0.05, 0.02, 20.0)
    with pytest.raises(hg.InsufficientHistoryError):
        to_slice(hist, 4.0)  # needs t through 8.5


def test_extractor_requires_t_end():
    ext = SliceExtractor([3.0, 5.0], 0.05, 1)
    assert ext.required_t_end() == pytest.approx(13.0, rel=1e-12)
    assert ext.pending()


def test_inner_region_height_bound():
    # where r <= t/2 on a slice, t stays below (2/sqrt(3)) s
    for s in (3.0, 7.0, 15.0):
        slc = Slice.build(s, 0.01)
        inner = slc.r <= slc.t / 2
        assert np.all(slc.t[inner] <= 2.0 / np.sqrt(3.0) * s * (1 + 1e-12))
