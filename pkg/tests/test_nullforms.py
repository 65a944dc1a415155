"""Null classification and the weighted one-frame bounds."""

from fractions import Fraction

import numpy as np
import pytest

from hypwave.conerat import ConeRational
from hypwave.nullforms import (
    MINKOWSKI,
    CubicForm,
    QuadraticForm,
    divergence_scan,
    form_from_text,
    frame00,
    frame000,
    is_null,
    null_bound_scan,
    oracle_is_null,
    random_cubic,
    random_quadratic,
    rational_directions,
)

MINK = QuadraticForm(MINKOWSKI)


def _basis_form(i, j, val=1):
    m = [[Fraction(0)] * 4 for _ in range(4)]
    m[i][j] = Fraction(val)
    return m


E00 = QuadraticForm(_basis_form(0, 0))
ANTI = QuadraticForm([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]])


def test_minkowski_is_null():
    assert is_null(MINK)


def test_time_squared_is_not_null():
    assert not is_null(E00)


def test_antisymmetric_is_null():
    assert is_null(ANTI)


def test_oracle_directions_are_exactly_unit():
    for n1, n2, n3, m in rational_directions(20)[:50]:
        assert n1 * n1 + n2 * n2 + n3 * n3 == m * m


def test_classifier_agrees_with_oracle_on_seeded_forms():
    rng = np.random.default_rng(0)
    for i in range(100):
        f = random_quadratic(rng, null=bool(i % 2))
        assert is_null(f) == oracle_is_null(f)
    for i in range(50):
        f = random_cubic(rng, null=bool(i % 2))
        assert is_null(f) == oracle_is_null(f)


def test_constructed_null_forms_really_are_null():
    rng = np.random.default_rng(5)
    for _ in range(20):
        assert is_null(random_quadratic(rng, null=True))
        assert is_null(random_cubic(rng, null=True))


def test_frame00_of_minkowski():
    assert frame00(MINK) == ConeRational.from_string("s^2/t^2")


def test_frame00_of_time_squared_and_antisymmetric():
    assert frame00(E00) == ConeRational.const(1)
    assert frame00(ANTI).is_zero()


def test_frame00_linearity():
    rng = np.random.default_rng(1)
    t1 = random_quadratic(rng, null=False)
    t2 = random_quadratic(rng, null=True)
    a, b = Fraction(2, 3), Fraction(-5, 7)
    combo = QuadraticForm(
        tuple(
            tuple(a * t1.coeffs[i][j] + b * t2.coeffs[i][j] for j in range(4))
            for i in range(4)
        ),
        bound=100,
    )
    assert frame00(combo) == frame00(t1).scale(a) + frame00(t2).scale(b)


def test_bound_scan_minkowski_is_exactly_one():
    sc = null_bound_scan(MINK)
    assert sc.measured[0] == pytest.approx(1.0, abs=1e-9)
    # one boost brings a factor 2 (r/t), capped at the grid margin
    assert sc.measured[1] == pytest.approx(2.0 * 0.999, abs=1e-6)


def test_bound_scan_antisymmetric_is_zero():
    sc = null_bound_scan(ANTI)
    assert sc.measured[0] == 0.0
    assert sc.measured[1] == 0.0


def test_bound_scan_rejects_non_null():
    with pytest.raises(ValueError):
        null_bound_scan(E00)


def test_divergence_of_non_null_probe():
    assert divergence_scan(E00) > 1.0e4


def test_seeded_null_family_within_frozen_constants():
    # frozen from the exhaustive pre-build scan: the weighted 00 component
    # of a K=1 null form never exceeds 1, and 2 after one boost
    rng = np.random.default_rng(0)
    for _ in range(50):
        f = random_quadratic(rng, null=True)
        sc = null_bound_scan(f)
        assert sc.measured[0] <= 1.0 + 1e-9
        assert sc.measured[1] <= 2.0 + 1e-9


def test_cubic_null_bound():
    rng = np.random.default_rng(2)
    for _ in range(10):
        f = random_cubic(rng, null=True)
        sc = null_bound_scan(f)
        assert sc.measured[0] <= 2.0 + 1e-9


def test_cubic_frame000_vanishes_for_null_with_null_linear_part():
    # metric (x) covector with zero time part: frame000 carries (s/t)^2
    c = [Fraction(0), Fraction(1), Fraction(0), Fraction(0)]
    a = [[[Fraction(0)] * 4 for _ in range(4)] for _ in range(4)]
    for al in range(4):
        for be in range(4):
            for ga in range(4):
                a[al][be][ga] = (
                    MINKOWSKI[al][be] * c[ga]
                    + MINKOWSKI[al][ga] * c[be]
                    + MINKOWSKI[be][ga] * c[al]
                ) / 3
    form = CubicForm(tuple(tuple(tuple(r) for r in p) for p in a))
    assert is_null(form)
    comp = frame000(form)
    # equals (s/t)^2 * (-x1/t) exactly
    want = ConeRational.from_string("-(s^2/t^2) * x1/t")
    assert comp == want


def test_form_file_parsing():
    q = form_from_text("quadratic\n1 0 0 0\n0 -1 0 0\n0 0 -1 0\n0 0 0 -1\n")
    assert isinstance(q, QuadraticForm) and is_null(q)
    rows = ["0 0 0 0"] * 16
    c = form_from_text("\n".join(rows))
    assert isinstance(c, CubicForm)
    with pytest.raises(ValueError):
        form_from_text("1 2 3\n")
    with pytest.raises(ValueError):
        form_from_text("quadratic\n1 0 0 0\n")


def test_bound_k_invariant():
    with pytest.raises(ValueError):
        QuadraticForm(MINKOWSKI, bound=Fraction(1, 2))
