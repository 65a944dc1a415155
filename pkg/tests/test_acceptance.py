"""Acceptance suite: one test per headline criterion, at pinned tolerances.

Each test prints a PASS/FAIL line; run with `pytest tests/test_acceptance.py -v`
(the heavy evolutions make this the slow part of the suite).
"""

import time


import numpy as np
import pytest

from hypwave import analyzer, cli, hypergeom, nullforms, opalgebra, solver

_here = []


def _record(name, ok, detail=""):
    line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}" + (f"  [{detail}]" if detail else "")
    _here.append(line)
    print(line)


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    # compile the evolution kernels outside any timed region
    solver.evolve(solver.system_null_prototype(),
                  solver.make_initial("poly4", 0.01, 2.0, n_components=2),
                  solver.GridParams(h_r=0.1, r_domain=8.0), 5.0)
    yield
    print()
    for line in _here:
        print(line)


def test_symbolic_identity_suite():
    t0 = time.perf_counter()
    results = opalgebra.run_identity_corpus()
    bad = [r for r in results if r.status != "pass" or r.residual_terms != 0]
    phi, psi = opalgebra.frame_matrices()
    frames_ok = phi.matmul(psi).is_identity() and psi.matmul(phi).is_identity()
    dec = opalgebra.wave_frame_decomposition()
    from hypwave.conerat import ConeRational

    c00_ok = dec.table[(0, 0)] == ConeRational.from_string("s^2/t^2")
    monomial_bad = dec.certify_on_monomials(4)
    elapsed = time.perf_counter() - t0
    ok = not bad and frames_ok and c00_ok and monomial_bad == 0 and elapsed < 5.0
    _record("symbolic-identity-suite", ok,
            f"{len(results)} identities, {elapsed:.2f}s")
    assert not bad
    assert frames_ok and c00_ok and monomial_bad == 0
    assert elapsed < 5.0


def test_commutator_audit():
    entries = opalgebra.commutator_table()
    n_fields = len(opalgebra.FIELD_NAMES)
    classified = all(e.kind in ("zero", "span", "rotation") for e in entries)
    deviations = opalgebra.closure_deviation(entries)
    ok = (len(entries) == n_fields**2 and classified and len(deviations) == 6)
    _record("commutator-audit", ok,
            f"{len(entries)} entries, {len(deviations)} flagged rotations")
    assert len(entries) == n_fields**2
    assert classified
    # the boost-boost commutators leave the advertised span: flagged
    assert len(deviations) == 6


def test_null_classifier_against_oracle():
    rng = np.random.default_rng(0)
    disagreements = 0
    for i in range(100):
        f = nullforms.random_quadratic(rng, null=bool(i % 2))
        disagreements += nullforms.is_null(f) != nullforms.oracle_is_null(f)
    for i in range(50):
        f = nullforms.random_cubic(rng, null=bool(i % 2))
        disagreements += nullforms.is_null(f) != nullforms.oracle_is_null(f)
    _record("null-classifier", disagreements == 0,
            f"{disagreements} disagreements on 150 forms")
    assert disagreements == 0


def test_null_form_weighted_bound():
    rng = np.random.default_rng(0)
    worst = {0: 0.0, 1: 0.0}
    for _ in range(50):
        f = nullforms.random_quadratic(rng, null=True)
        scan = nullforms.null_bound_scan(f)
        worst[0] = max(worst[0], scan.measured[0])
        worst[1] = max(worst[1], scan.measured[1])
    probe = nullforms.QuadraticForm(
        tuple(tuple(1 if i == j == 0 else 0 for j in range(4)) for i in range(4)))
    div = nullforms.divergence_scan(probe)
    ok = (worst[0] <= cli.FROZEN_NULL_BOUND[0]
          and worst[1] <= cli.FROZEN_NULL_BOUND[1] and div > 1.0e4)
    _record("null-form-weighted-bound", ok,
            f"sup={worst[0]:.6f}, boosted={worst[1]:.6f}, divergence={div:.0f}")
    assert worst[0] <= cli.FROZEN_NULL_BOUND[0]
    assert worst[1] <= cli.FROZEN_NULL_BOUND[1]
    assert div > 1.0e4


def test_linear_wave_criterion(tmp_path):
    t0 = time.perf_counter()
    res = cli.run(cli.presets()["linear-wave"], tmp_path / "lw")
    checks = {c[0]: c for c in res.checks}
    # three-resolution self-convergence and the closed-form error orders
    sols = {}
    errs = {}
    hs = (1 / 40, 1 / 80, 1 / 160)
    for h in hs:
        hist = solver.evolve(solver.system_linear_wave(),
                             solver.make_initial("expbump", 0.3, 2.0),
                             solver.GridParams(h_r=h, r_domain=16.0), 13.0,
                             sigma_ko=0.0, store_every=10**9)
        t_fin, w, _ = hist.final()
        sols[h] = w[0]
        r = np.arange(w.shape[1]) * h
        errs[h] = float(np.sqrt(np.sum(
            (w[0] - cli._dalembert(t_fin, r, 3.0, 2.0, 0.3)) ** 2) * h))
    rich = float(np.log2(np.max(np.abs(sols[hs[0]] - sols[hs[1]][::2]))
                         / np.max(np.abs(sols[hs[1]] - sols[hs[2]][::2]))))
    closed = min(float(np.log2(errs[hs[0]] / errs[hs[1]])),
                 float(np.log2(errs[hs[1]] / errs[hs[2]])))
    elapsed = time.perf_counter() - t0
    ok = (checks["energy_constancy"][3] and checks["support_ok"][3]
          and rich >= 3.5 and closed >= 3.5 and elapsed < 120.0)
    _record("linear-wave", ok,
            f"energy dev {checks['energy_constancy'][1]:.2e}, "
            f"orders {rich:.2f}/{closed:.2f}, {elapsed:.0f}s")
    assert checks["energy_constancy"][3], checks["energy_constancy"]
    assert checks["support_ok"][3]
    assert rich >= 3.5
    assert closed >= 3.5
    assert elapsed < 120.0


def test_linear_klein_gordon_decay(tmp_path):
    t0 = time.perf_counter()
    res = cli.run(cli.presets()["linear-kg"], tmp_path / "kg")
    checks = {c[0]: c for c in res.checks}
    elapsed = time.perf_counter() - t0
    slope = checks["kg_decay_slope"][1]
    ok = checks["kg_decay_slope"][3] and elapsed < 300.0
    _record("linear-klein-gordon-decay", ok, f"|slope|={slope:.3f}, {elapsed:.0f}s")
    assert slope <= 0.1
    assert elapsed < 300.0


def test_null_prototype_criterion(tmp_path):
    res = cli.run(cli.presets()["null-prototype"], tmp_path / "proto")
    checks = {c[0]: c for c in res.checks}
    ok = all(checks[k][3] for k in ("structure_compliant", "no_blowup",
                                    "low_order_wave_variation",
                                    "top_order_growth_exponent",
                                    "energy_inequality"))
    _record("null-prototype", ok,
            f"delta={checks['top_order_growth_exponent'][1]:.3f}, "
            f"low-order var={checks['low_order_wave_variation'][1]:.3f}, "
            f"residual={checks['energy_inequality'][1]:.2e}")
    assert checks["structure_compliant"][3]
    assert checks["no_blowup"][3]
    assert checks["top_order_growth_exponent"][1] <= 0.2
    assert checks["low_order_wave_variation"][1] <= 0.10
    assert checks["energy_inequality"][3]


def test_nonull_blowup_pair(tmp_path):
    res = cli.run(cli.presets()["nonull-blowup"], tmp_path / "bp")
    checks = {c[0]: c for c in res.checks}
    ok = checks["expects_blowup"][3] and checks["null_twin_bounded"][3]
    _record("nonull-blowup-pair", ok,
            f"twin sup={checks['null_twin_bounded'][1]:.2f}")
    assert checks["expects_blowup"][3]
    assert checks["null_twin_bounded"][3]


def test_sobolev_and_hardy_ratios(tmp_path):
    res = cli.run(cli.presets()["sobolev-suite"], tmp_path / "sob")
    checks = {c[0]: c for c in res.checks}
    # run-produced slices at two resolutions
    run_ratios = {}
    for h in (1 / 50, 1 / 100):
        s_vals = (5.0, 8.0)
        ext = hypergeom.SliceExtractor(s_vals, h, 1, 2)
        solver.evolve(solver.system_linear_wave(),
                      solver.make_initial("expbump", 0.3, 2.0),
                      solver.GridParams(h_r=h, r_domain=34.0), 33.5,
                      sigma_ko=0.0, extractor=ext)
        run_ratios[h] = [
            (analyzer.sobolev_check(ext.results[s], 0),
             analyzer.hardy_check(ext.results[s], 0, "H")) for s in s_vals
        ]
    stab = max(
        abs(a[k] - b[k]) / max(abs(b[k]), 1e-30)
        for a, b in zip(run_ratios[1 / 50], run_ratios[1 / 100]) for k in (0, 1)
    )
    bounded = all(np.isfinite(v) and v < 100.0
                  for pair in run_ratios[1 / 100] for v in pair)
    ok = (checks["sobolev_bounded"][3] and checks["sobolev_stability"][3]
          and checks["hardy_stability"][3] and stab <= 0.05 and bounded)
    _record("sobolev-hardy-ratios", ok,
            f"profile stability {checks['sobolev_stability'][1]:.2e}, "
            f"run-slice stability {stab:.2e}")
    assert checks["sobolev_bounded"][3]
    assert checks["sobolev_stability"][3]
    assert checks["hardy_stability"][3]
    assert bounded
    assert stab <= 0.05
