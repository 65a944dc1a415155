"""Operator algebra: commutators, frames, identity corpus."""

from fractions import Fraction

import numpy as np
import pytest

from hypwave.conerat import CR_ONE, CR_S, CR_T, CR_X, ConeRational
from hypwave.opalgebra import (
    FIELD_NAMES,
    LinDiffOp,
    OrderOverflowError,
    classify_commutator,
    closure_deviation,
    commutator_table,
    commute,
    frame_matrices,
    residual_terms,
    run_identity_corpus,
    verify_identity,
    wave_frame_decomposition,
)

DT = LinDiffOp.partial(0)
DX = {a: LinDiffOp.partial(a) for a in (1, 2, 3)}
H = {a: LinDiffOp.boost(a) for a in (1, 2, 3)}


def test_partials_commute():
    assert commute(DT, DX[1]).is_zero()
    assert commute(DX[2], DX[3]).is_zero()


def test_boost_with_matching_spatial_partial():
    # [H_1, d_1] = -d_t
    assert commute(H[1], DX[1]) == -DT
    assert commute(H[1], DX[2]).is_zero()


def test_boost_boost_is_rotation():
    got = commute(H[1], H[2])
    want = DX[2].scale(CR_X[0]) - DX[1].scale(CR_X[1])  # x1 d2 - x2 d1
    assert got == want


def test_weighted_dbar_time_commutator():
    # [d_t, dbar_1] = -(x1/t^2) d_t
    got = commute(DT, LinDiffOp.dbar(1))
    want = DT.scale(-(CR_X[0] / (CR_T * CR_T)))
    assert got == want


def test_function_identity_boost_of_ratio():
    # H_b(x^a/t) = -(x^a/t)(x^b/t) + delta_ab
    for a in (1, 2, 3):
        for b in (1, 2, 3):
            ratio = CR_X[a - 1] / CR_T
            got = H[b].apply(ratio)
            want = -(ratio * (CR_X[b - 1] / CR_T))
            if a == b:
                want = want + CR_ONE
            assert got == want


def test_distinct_operators_refuted():
    assert not verify_identity(DX[1], DX[2])
    assert residual_terms(DX[1], DX[2]) == 2


def test_composition_order_cap():
    box = LinDiffOp.box()
    with pytest.raises(OrderOverflowError):
        H[1].compose(box)
    # but the commutator fits (and vanishes: boosts are symmetries)
    assert commute(H[1], box).is_zero()
    assert commute(DT, box).is_zero()


def test_boost_annihilates_hyperbolic_radius():
    for a in (1, 2, 3):
        assert H[a].apply(CR_S).is_zero()


def test_frame_matrices_are_exact_inverses():
    phi, psi = frame_matrices()
    assert phi.matmul(psi).is_identity()
    assert psi.matmul(phi).is_identity()
    for a in (1, 2, 3):
        assert psi[a, 0] == -(CR_X[a - 1] / CR_T)
        assert phi[a, 0] == CR_X[a - 1] / CR_T


def test_one_frame_reconstruction():
    phi, _ = frame_matrices()
    for a in (1, 2, 3):
        acc = LinDiffOp.zero()
        for b in range(4):
            acc = acc + LinDiffOp.partial(b).scale(phi[a, b])
        assert acc == LinDiffOp.dbar(a)


def test_wave_frame_decomposition_table():
    dec = wave_frame_decomposition()
    s2t2 = ConeRational.from_string("s^2/t^2")
    assert dec.table[(0, 0)] == s2t2
    for a in (1, 2, 3):
        ratio = CR_X[a - 1] / CR_T
        assert dec.table[(0, a)] == ratio
        assert dec.table[(a, 0)] == ratio
        for b in (1, 2, 3):
            want = ConeRational.const(-1 if a == b else 0)
            assert dec.table[(a, b)] == want
    # frozen first-order remainder: (3/t) d_t
    assert dec.correction == DT.scale(ConeRational.const(3) / CR_T)


def test_wave_decomposition_certified_on_monomials():
    dec = wave_frame_decomposition()
    assert dec.certify_on_monomials(4) == 0


def test_wave_operator_annihilates_constants():
    dec = wave_frame_decomposition()
    one = ConeRational.const(1)
    assert LinDiffOp.box().apply(one).is_zero()
    assert dec.assembled().apply(one).is_zero()


def test_identity_corpus_all_pass_exactly():
    results = run_identity_corpus()
    assert len(results) > 100
    bad = [r for r in results if r.status != "pass" or r.residual_terms != 0]
    assert bad == []


def test_commutator_table_size_and_closure():
    entries = commutator_table()
    assert len(entries) == len(FIELD_NAMES) ** 2
    kinds = {e.kind for e in entries}
    assert kinds == {"zero", "span", "rotation"}
    dev = closure_deviation(entries)
    # exactly the boost-boost pairs leave the advertised span
    assert sorted((e.left, e.right) for e in dev) == [
        ("H1", "H2"), ("H1", "H3"), ("H2", "H1"),
        ("H2", "H3"), ("H3", "H1"), ("H3", "H2"),
    ]


def test_classifier_on_constructed_operators():
    op = DT.scale(ConeRational.const(2)) + H[2].scale(ConeRational.const(-3))
    kind, detail = classify_commutator(op)
    assert kind == "span"
    assert "2*dt" in detail and "-3*H2" in detail
    rot = DX[2].scale(CR_X[0]) - DX[1].scale(CR_X[1])
    kind, _ = classify_commutator(rot)
    assert kind == "rotation"
    other = DT.scale(CR_T)
    assert classify_commutator(other)[0] == "other"


def test_cross_module_radial_boost_identity():
    # H_a u = x^a * (u_t + 2 t u_rho) for radial u = f(t, rho), rho = |x|^2
    rho = CR_X[0] * CR_X[0] + CR_X[1] * CR_X[1] + CR_X[2] * CR_X[2]
    u = rho * CR_T + rho * rho
    for a in (1, 2, 3):
        lhs = H[a].apply(u)
        # f_t + 2 t f_rho with f_rho read off: f = rho t + rho^2
        f_t = rho
        f_rho = CR_T + rho.scale(2)
        rhs = CR_X[a - 1] * (f_t + CR_T.scale(2) * f_rho)
        assert lhs == rhs


def test_apply_linearity_randomized():
    rng = np.random.default_rng(3)
    ops = [DT, DX[1], H[2], LinDiffOp.dbar(3), LinDiffOp.box()]
    fns = [CR_T * CR_T, CR_S, CR_X[0] * CR_S / CR_T, CR_ONE / CR_T]
    for _ in range(20):
        op = ops[rng.integers(0, len(ops))]
        f = fns[rng.integers(0, len(fns))]
        g = fns[rng.integers(0, len(fns))]
        c = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3)))
        lhs = op.apply(f.scale(c) + g)
        rhs = op.apply(f).scale(c) + op.apply(g)
        assert lhs == rhs
