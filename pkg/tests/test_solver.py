"""Radial evolution: structure validation, convergence, conservation."""

from fractions import Fraction

import numpy as np
import pytest

from hypwave.solver import (
    BoundaryContaminationError,
    CFLError,
    GridParams,
    InitialData,
    RadialRestrictionError,
    SystemSpec,
    evolve,
    make_initial,
    plane_energy,
    plane_energy_series,
    profile_values,
    system_linear_kg,
    system_linear_wave,
    system_nonull_probe,
    system_null_prototype,
    system_null_twin,
    system_quasilinear_demo,
    validate_system,
)


def dalembert(t, r, t0, B, eps):
    """Spherical closed form for data (bump, 0)."""
    def g(x):
        x = np.abs(np.asarray(x, dtype=float)) / B
        out = np.zeros_like(x)
        m = x < 1.0
        out[m] = eps * np.exp(1.0 - 1.0 / (1.0 - x[m] ** 2))
        return out

    tb = t - t0
    def vt(x):
        return x * g(x)
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    nz = r > 1e-12
    out[nz] = (vt(r[nz] + tb) + vt(r[nz] - tb)) / (2.0 * r[nz])
    hh = 1e-6
    out[~nz] = (vt(tb + hh) - vt(tb - hh)) / (2 * hh)
    return out


# ---------------------------------------------------------------------------
# structure validation
# ---------------------------------------------------------------------------


def test_prototype_is_compliant():
    rep = validate_system(system_null_prototype())
    assert rep.compliant, rep.violations


def test_nonull_probe_fails_null_clause():
    rep = validate_system(system_nonull_probe())
    assert not rep.compliant
    assert "null-P" in rep.clauses()


def test_bare_wave_factor_fails_vanishing_clause():
    spec = SystemSpec(n_components=2, masses=(0.0, 1.0))
    spec.add_r(1, 0, 0, 1)  # u*u source: undifferentiated wave factors
    rep = validate_system(spec)
    assert not rep.compliant
    assert "vanishing-R" in rep.clauses()
    spec2 = SystemSpec(n_components=2, masses=(0.0, 1.0))
    spec2.add_q(1, 1, 0, 1)  # u dtv source
    rep2 = validate_system(spec2)
    assert "vanishing-Q" in rep2.clauses()


def test_kg_bare_factors_are_allowed():
    spec = SystemSpec(n_components=2, masses=(0.0, 1.0))
    spec.add_r(0, 1, 1, 1)     # v*v in the wave equation
    spec.add_q(0, 0, 1, 1)     # v du
    rep = validate_system(spec)
    assert rep.compliant, rep.violations


def test_symmetry_clause():
    spec = SystemSpec(n_components=2, masses=(0.0, 1.0))
    spec.add_b(0, 1, 1, tt=1, xx=-1)  # missing the (1,0) partner
    rep = validate_system(spec)
    assert "symmetry" in rep.clauses()


def test_magnitude_clause():
    spec = SystemSpec(n_components=1, masses=(0.0,), bound=Fraction(1, 2))
    spec.add_p(0, 0, 0, tt=1, xx=-1)
    rep = validate_system(spec)
    assert "magnitude" in rep.clauses()


def test_radial_restriction_rejects_anisotropy():
    spec = SystemSpec(n_components=1, masses=(0.0,))
    m = [[Fraction(0)] * 4 for _ in range(4)]
    m[0][1] = Fraction(1)  # mixed time-space component
    spec.add_p_full(0, 0, 0, m)
    with pytest.raises(RadialRestrictionError):
        spec.radial_p()
    spec2 = SystemSpec(n_components=1, masses=(0.0,))
    spec2.add_q_full(0, 0, 0, (0, 1, 0, 0))
    with pytest.raises(RadialRestrictionError):
        spec2.radial_q()


def test_masses_must_put_waves_first():
    with pytest.raises(ValueError):
        SystemSpec(n_components=2, masses=(1.0, 0.0))


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------


def test_make_initial_examples():
    data = make_initial("poly4", 0.0, 2.0)
    r = np.linspace(0, 3, 100)
    w0, w1 = data.arrays(r)
    assert np.all(w0 == 0.0) and np.all(w1 == 0.0)
    data = make_initial("poly4", 0.25, 2.0)
    w0, _ = data.arrays(r)
    assert w0[0, 0] == pytest.approx(0.25)
    assert np.all(w0[0, r >= 2.0] == 0.0)
    with pytest.raises(ValueError):
        make_initial("unknown-bump", 0.1, 2.0)
    with pytest.raises(ValueError):
        make_initial("poly4", -0.1, 2.0)


def test_poly4_profile_smoothness_at_edge():
    # fourth derivative stays bounded through r = B
    h = 1e-4
    r = np.arange(1.99, 2.01, h)
    v = profile_values("poly4", r, 2.0)
    d4 = np.diff(v, 4) / h**4
    assert np.max(np.abs(d4)) < 50.0


def test_initial_plane_energy_matches_fine_quadrature():
    eps, B = 0.3, 2.0
    h = 1 / 400
    r = np.arange(0.0, 3.0, h)
    data = make_initial("expbump", eps, B, velocity_profile="poly4")
    w0, w1 = data.arrays(r)
    e = plane_energy(w0[0], w1[0], 0.0, h)
    # oracle: very fine grid quadrature of the closed forms
    hf = 1 / 6400
    rf = np.arange(0.0, 3.0, hf)
    w0f, w1f = data.arrays(rf)
    ef = plane_energy(w0f[0], w1f[0], 0.0, hf)
    assert e == pytest.approx(ef, rel=1e-6)


# ---------------------------------------------------------------------------
# evolution
# ---------------------------------------------------------------------------


def test_zero_data_stays_zero():
    hist = evolve(system_linear_wave(), make_initial("poly4", 0.0, 2.0),
                  GridParams(h_r=0.05, r_domain=12.0), 10.0, store_every=100)
    t, w, wt = hist.final()
    assert np.all(w == 0.0) and np.all(wt == 0.0)
    assert not hist.blowup


def test_cfl_and_domain_guards():
    with pytest.raises(CFLError):
        evolve(system_linear_wave(), make_initial("poly4", 0.1, 2.0),
               GridParams(h_r=0.05, r_domain=12.0, cfl=0.8), 10.0)
    with pytest.raises(BoundaryContaminationError):
        evolve(system_linear_wave(), make_initial("poly4", 0.1, 2.0),
               GridParams(h_r=0.05, r_domain=6.0), 10.0)


def test_linear_wave_matches_closed_form_at_high_order():
    errs = {}
    for h in (1 / 40, 1 / 80, 1 / 160):
        hist = evolve(system_linear_wave(), make_initial("expbump", 0.3, 2.0),
                      GridParams(h_r=h, r_domain=16.0), 13.0, sigma_ko=0.0,
                      store_every=10**9)
        t_fin, w, _ = hist.final()
        r = np.arange(w.shape[1]) * h
        errs[h] = np.sqrt(np.sum((w[0] - dalembert(t_fin, r, 3.0, 2.0, 0.3))**2) * h)
    hs = sorted(errs, reverse=True)
    orders = [np.log2(errs[a] / errs[b]) for a, b in zip(hs, hs[1:])]
    assert min(orders) >= 3.5


def test_richardson_self_convergence_wave_and_kg():
    for spec in (system_linear_wave(), system_linear_kg(1.0)):
        sols = {}
        for h in (1 / 40, 1 / 80, 1 / 160):
            hist = evolve(spec, make_initial("expbump", 0.3, 2.0),
                          GridParams(h_r=h, r_domain=16.0), 11.0, sigma_ko=0.0,
                          store_every=10**9)
            _, w, _ = hist.final()
            sols[h] = w[0]
        d1 = np.max(np.abs(sols[1 / 40][::1] - sols[1 / 80][::2]))
        d2 = np.max(np.abs(sols[1 / 80][::1] - sols[1 / 160][::2]))
        order = np.log2(d1 / d2)
        assert order >= 3.5, order


def test_amplitude_scaling_linearity():
    data = make_initial("expbump", 0.2, 2.0)
    grid = GridParams(h_r=1 / 50, r_domain=12.0)
    h1 = evolve(system_linear_wave(), data, grid, 10.0, store_every=10**9)
    h2 = evolve(system_linear_wave(), data.scaled(3.0), grid, 10.0, store_every=10**9)
    _, w1, _ = h1.final()
    _, w2, _ = h2.final()
    assert np.max(np.abs(w2 - 3.0 * w1)) < 5e-12 * np.max(np.abs(w2))


def test_kg_plane_energy_conserved():
    hist = evolve(system_linear_kg(1.0), make_initial("expbump", 0.2, 2.0),
                  GridParams(h_r=1 / 100, r_domain=31.0), 30.0, sigma_ko=0.0,
                  store_every=400)
    ts, es = plane_energy_series(hist, 0, 1.0)
    assert ts[-1] >= 29.0
    drift = np.max(np.abs(es - es[0])) / es[0]
    assert drift <= 1e-6


def test_support_containment_at_reference_resolution():
    hist = evolve(system_linear_wave(), make_initial("expbump", 0.3, 2.0),
                  GridParams(h_r=1 / 200, r_domain=22.0), 20.0, sigma_ko=0.0)
    assert hist.support_ok


def test_nonnull_blowup_and_null_twin():
    # wide positive-velocity data keeps the time derivative pumped at the
    # center past the quadratic-growth horizon; the metric null form on
    # identical data stays bounded (its exp-transform free field stays
    # uniformly positive at this width)
    grid = GridParams(h_r=1 / 40, r_domain=26.0)
    data = InitialData([("zero", "expbump")], 0.5, 5.4)
    probe = evolve(system_nonull_probe(), data, grid, 25.0, store_every=10**9)
    assert probe.blowup
    assert probe.blowup_time is not None and probe.blowup_time < 25.0
    # monotone sup growth into the blow-up
    tail = probe.sup_series[-30:]
    assert np.all(np.diff(tail) > 0)
    twin = evolve(system_null_twin(), data, grid, 25.0, store_every=10**9)
    assert not twin.blowup
    assert np.max(twin.sup_series) < 5.0


def test_quasilinear_demo_runs_and_converges():
    spec = system_quasilinear_demo(Fraction(1, 5))
    sols = {}
    for h in (1 / 20, 1 / 40, 1 / 80):
        hist = evolve(spec, make_initial("expbump", 0.1, 2.0),
                      GridParams(h_r=h, r_domain=10.0), 8.0, sigma_ko=0.0,
                      store_every=10**9)
        _, w, _ = hist.final()
        sols[h] = w[0]
    d1 = np.max(np.abs(sols[1 / 20] - sols[1 / 40][::2]))
    d2 = np.max(np.abs(sols[1 / 40] - sols[1 / 80][::2]))
    assert np.log2(d1 / d2) >= 3.0
    assert not hist.blowup


def test_history_checkpointing_levels():
    hist = evolve(system_linear_wave(), make_initial("expbump", 0.2, 2.0),
                  GridParams(h_r=1 / 25, r_domain=12.0), 10.0, store_every=5)
    ts = hist.times()
    assert len(ts) > 10
    assert np.allclose(np.diff(ts)[:-1], np.diff(ts)[0])
    t, w, wt, wtt = hist.level(3)
    assert w.shape == wt.shape == wtt.shape
