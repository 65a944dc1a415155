"""Classification of constant quadratic/cubic forms against the light cone.

A form is null when it vanishes on every cone covector xi with
xi_0^2 = |xi'|^2.  The decision is algebraic: restrict to xi = (1, w),
reduce the resulting polynomial modulo |w|^2 = 1 and test for the zero
normal form.  Direction sampling in exact integer arithmetic is kept as an
independent oracle.  The 00 one-frame component and its boosted variants
come out of the exact operator algebra, which is what the (t/s)^2-weighted
bound scans measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import numpy as np

from .conerat import CR_ONE, CR_T, CR_X, CR_ZERO, ConeRational
from .opalgebra import LinDiffOp

MINKOWSKI = tuple(
    tuple(Fraction(1 if i == j == 0 else (-1 if i == j else 0)) for j in range(4))
    for i in range(4)
)


def _as_fraction_array(coeffs, shape):
    def conv(node, dims):
        if dims == 0:
            return Fraction(node)
        return tuple(conv(sub, dims - 1) for sub in node)

    arr = conv(coeffs, len(shape))

    def check(node, dims, size):
        if dims == 0:
            return
        if len(node) != size:
            raise ValueError(f"coefficient array is not {'x'.join(map(str, shape))}")
        for sub in node:
            check(sub, dims - 1, size)

    check(arr, len(shape), shape[0])
    return arr


def _flat(arr):
    out = []

    def walk(node):
        if isinstance(node, Fraction):
            out.append(node)
        else:
            for sub in node:
                walk(sub)

    walk(arr)
    return out


@dataclass(frozen=True)
class QuadraticForm:
    coeffs: tuple  # 4x4 Fraction
    bound: Fraction = None  # K >= max |T^{ab}|

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_fraction_array(self.coeffs, (4, 4)))
        mx = max((abs(c) for c in _flat(self.coeffs)), default=Fraction(0))
        k = mx if self.bound is None else Fraction(self.bound)
        if k < mx:
            raise ValueError("bound K smaller than the largest coefficient")
        object.__setattr__(self, "bound", k)

    def rank(self):
        return 2


@dataclass(frozen=True)
class CubicForm:
    coeffs: tuple  # 4x4x4 Fraction
    bound: Fraction = None

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_fraction_array(self.coeffs, (4, 4, 4)))
        mx = max((abs(c) for c in _flat(self.coeffs)), default=Fraction(0))
        k = mx if self.bound is None else Fraction(self.bound)
        if k < mx:
            raise ValueError("bound K smaller than the largest coefficient")
        object.__setattr__(self, "bound", k)

    def rank(self):
        return 3


# ---------------------------------------------------------------------------
# algebraic null test
# ---------------------------------------------------------------------------


def _sphere_reduce(poly: dict) -> dict:
    """Reduce a polynomial in (w1, w2, w3) modulo w3^2 -> 1 - w1^2 - w2^2."""
    work = dict(poly)
    done = {}
    while work:
        (e1, e2, e3), c = work.popitem()
        if c == 0:
            continue
        if e3 < 2:
            key = (e1, e2, e3)
            done[key] = done.get(key, Fraction(0)) + c
            continue
        for key, sign in (
            ((e1, e2, e3 - 2), 1),
            ((e1 + 2, e2, e3 - 2), -1),
            ((e1, e2 + 2, e3 - 2), -1),
        ):
            work[key] = work.get(key, Fraction(0)) + sign * c
    return {k: v for k, v in done.items() if v != 0}


def _cone_polynomial(form) -> dict:
    """The restriction xi = (1, w) as a polynomial in w."""
    poly: dict = {}

    def add(mono, c):
        if c:
            poly[mono] = poly.get(mono, Fraction(0)) + c

    if form.rank() == 2:
        for al in range(4):
            for be in range(4):
                c = form.coeffs[al][be]
                if not c:
                    continue
                mono = [0, 0, 0]
                for idx in (al, be):
                    if idx:
                        mono[idx - 1] += 1
                add(tuple(mono), c)
    else:
        for al in range(4):
            for be in range(4):
                for ga in range(4):
                    c = form.coeffs[al][be][ga]
                    if not c:
                        continue
                    mono = [0, 0, 0]
                    for idx in (al, be, ga):
                        if idx:
                            mono[idx - 1] += 1
                    add(tuple(mono), c)
    return {k: v for k, v in poly.items() if v != 0}


def is_null(form) -> bool:
    """True iff the form vanishes identically on the null cone.  Both signs
    of xi_0 are covered by homogeneity (even/odd under xi -> -xi)."""
    return not _sphere_reduce(_cone_polynomial(form))


# ---------------------------------------------------------------------------
# direction-sampling oracle (exact integers)
# ---------------------------------------------------------------------------


def rational_directions(n_side: int = 100):
    """About n_side^2 quasi-uniform rational unit vectors from an offset
    stereographic grid; returned as integer triples with a denominator."""
    d = 2 * (n_side // 7 + 1)
    dirs = []
    for i in range(-n_side // 2, n_side - n_side // 2):
        for j in range(-n_side // 2, n_side - n_side // 2):
            u, v = 2 * i + 1, 2 * j + 1
            m = d * d + u * u + v * v
            dirs.append((2 * u * d, 2 * v * d, d * d - u * u - v * v, m))
    return dirs


_DEFAULT_DIRS = None


def oracle_is_null(form, directions=None) -> bool:
    """Brute-force oracle: evaluate the form at quasi-uniform rational cone
    directions, exactly; declare null iff every value is exactly zero."""
    global _DEFAULT_DIRS
    if directions is None:
        if _DEFAULT_DIRS is None:
            _DEFAULT_DIRS = rational_directions(100)
        directions = _DEFAULT_DIRS
    flat = _flat(form.coeffs)
    denom = 1
    for c in flat:
        denom = denom * c.denominator // math.gcd(denom, c.denominator)
    n1 = np.array([d[0] for d in directions], dtype=object)
    n2 = np.array([d[1] for d in directions], dtype=object)
    n3 = np.array([d[2] for d in directions], dtype=object)
    m = np.array([d[3] for d in directions], dtype=object)
    comp = (m, n1, n2, n3)
    total = np.zeros(len(directions), dtype=object)
    if form.rank() == 2:
        for al in range(4):
            for be in range(4):
                c = form.coeffs[al][be]
                if not c:
                    continue
                total = total + int(c * denom) * comp[al] * comp[be]
    else:
        for al in range(4):
            for be in range(4):
                for ga in range(4):
                    c = form.coeffs[al][be][ga]
                    if not c:
                        continue
                    total = total + int(c * denom) * comp[al] * comp[be] * comp[ga]
    return not any(v != 0 for v in total)


# ---------------------------------------------------------------------------
# one-frame components
# ---------------------------------------------------------------------------


def _psi_column0():
    # d_alpha = Psi_alpha^beta frame_beta; the 0-column is (1, -x^a/t)
    return (CR_ONE, -(CR_X[0] / CR_T), -(CR_X[1] / CR_T), -(CR_X[2] / CR_T))


def frame00(form: QuadraticForm) -> ConeRational:
    """Exact 00 one-frame component T^{ab} Psi_a^0 Psi_b^0."""
    psi0 = _psi_column0()
    acc = CR_ZERO
    for al in range(4):
        for be in range(4):
            c = form.coeffs[al][be]
            if c:
                acc = acc + (psi0[al] * psi0[be]).scale(c)
    return acc


def frame000(form: CubicForm) -> ConeRational:
    psi0 = _psi_column0()
    acc = CR_ZERO
    for al in range(4):
        for be in range(4):
            for ga in range(4):
                c = form.coeffs[al][be][ga]
                if c:
                    acc = acc + (psi0[al] * psi0[be] * psi0[ga]).scale(c)
    return acc


def frame_component(form) -> ConeRational:
    return frame00(form) if form.rank() == 2 else frame000(form)


# ---------------------------------------------------------------------------
# weighted bound scans
# ---------------------------------------------------------------------------

CONE_MARGIN = 1.0e-3  # scans stay at r/t <= 1 - margin


def _float_dirs(n: int = 14):
    """A small fixed set of unit directions: axes plus stereographic spread."""
    dirs = [(1.0, 0.0, 0.0), (-1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, -1.0, 0.0),
            (0.0, 0.0, 1.0), (0.0, 0.0, -1.0)]
    k = 0
    while len(dirs) < n:
        p = 0.3 + 0.45 * (k % 3)
        q = -0.6 + 0.4 * (k // 3)
        m = 1.0 + p * p + q * q
        dirs.append((2 * p / m, 2 * q / m, (1 - p * p - q * q) / m))
        k += 1
    return dirs


def _field_evaluator(expr: ConeRational):
    """Callable (t, x1, x2, x3) -> float array for a ConeRational, with
    s = sqrt(t^2 - |x|^2) substituted."""
    import sympy

    t, x1, x2, x3, s = sympy.symbols("t x1 x2 x3 s")
    e = expr.to_sympy().subs(s, sympy.sqrt(t * t - x1 * x1 - x2 * x2 - x3 * x3))
    return sympy.lambdify((t, x1, x2, x3), e, "numpy")


@dataclass
class BoundScan:
    measured: dict  # boost order -> measured sup of (t/s)^2 |frame00| / K
    grid_points: int


def null_bound_scan(form, ratio_step: float = 1.0e-3, directions=None,
                    max_boost_order: int = 1) -> BoundScan:
    """Sup over a cone-interior grid of (t/s)^2 |frame 00 component| / K for
    a null form, including the exact boost-derived components for order 1.
    Non-null input is rejected; use divergence_scan for that regime."""
    if not is_null(form):
        raise ValueError("null_bound_scan expects a null form")
    if directions is None:
        directions = _float_dirs()
    rho = np.arange(0.0, 1.0 - CONE_MARGIN + ratio_step / 2, ratio_step)
    weight = 1.0 / (1.0 - rho * rho)
    k = float(form.bound) if form.bound else 1.0

    comp = frame_component(form)
    exprs = {0: [comp]}
    if max_boost_order >= 1:
        exprs[1] = [LinDiffOp.boost(a).apply(comp) for a in (1, 2, 3)]

    measured = {}
    for order, lst in exprs.items():
        sup = 0.0
        for e in lst:
            if e.is_zero():
                continue
            fn = _field_evaluator(e)
            for w in directions:
                vals = np.abs(np.asarray(fn(1.0, rho * w[0], rho * w[1], rho * w[2]),
                                         dtype=float))
                sup = max(sup, float(np.max(weight * vals)) / k)
        measured[order] = sup
    if 1 in measured:
        measured[1] = max(measured[1], measured[0])
    return BoundScan(measured=measured, grid_points=len(rho) * len(directions))


def divergence_scan(form, rho_max: float = 1.0 - 1.0e-5, n: int = 4000) -> float:
    """Sup of (t/s)^2 |frame 00 component| on a grid approaching the cone;
    for non-null forms this grows without bound as r/t -> 1."""
    comp = frame_component(form)
    fn = _field_evaluator(comp)
    rho = np.linspace(0.0, rho_max, n)
    weight = 1.0 / (1.0 - rho * rho)
    sup = 0.0
    for w in _float_dirs():
        vals = np.abs(np.asarray(fn(1.0, rho * w[0], rho * w[1], rho * w[2]), dtype=float))
        sup = max(sup, float(np.max(weight * vals)))
    return sup


# ---------------------------------------------------------------------------
# random form generation (seeded)
# ---------------------------------------------------------------------------


def _rand_fraction(rng) -> Fraction:
    num = int(rng.integers(-9, 10))
    den = int(rng.integers(1, 5))
    return Fraction(num, den)


def _normalize_k1(flat_get, flat_set, indices):
    mx = max((abs(flat_get(i)) for i in indices), default=Fraction(0))
    if mx:
        for i in indices:
            flat_set(i, flat_get(i) / mx)


def random_quadratic(rng, null: bool) -> QuadraticForm:
    t = [[Fraction(0)] * 4 for _ in range(4)]
    if null:
        cm = _rand_fraction(rng)
        for i in range(4):
            t[i][i] = cm * MINKOWSKI[i][i]
        for i in range(4):
            for j in range(i + 1, 4):
                a = _rand_fraction(rng)
                t[i][j] += a
                t[j][i] -= a
    else:
        for i in range(4):
            for j in range(4):
                t[i][j] = _rand_fraction(rng)
    idx = [(i, j) for i in range(4) for j in range(4)]
    _normalize_k1(lambda ij: t[ij[0]][ij[1]],
                  lambda ij, v: t[ij[0]].__setitem__(ij[1], v), idx)
    return QuadraticForm(tuple(tuple(r) for r in t))


def random_cubic(rng, null: bool) -> CubicForm:
    a = [[[Fraction(0)] * 4 for _ in range(4)] for _ in range(4)]
    if null:
        # any null cubic is (metric tensor product a linear form) up to a
        # term with vanishing full symmetrization
        c = [_rand_fraction(rng) for _ in range(4)]
        for al in range(4):
            for be in range(4):
                for ga in range(4):
                    a[al][be][ga] = (
                        MINKOWSKI[al][be] * c[ga]
                        + MINKOWSKI[al][ga] * c[be]
                        + MINKOWSKI[be][ga] * c[al]
                    ) / 3
        b = [[[_rand_fraction(rng) for _ in range(4)] for _ in range(4)] for _ in range(4)]
        for al in range(4):
            for be in range(4):
                for ga in range(4):
                    sym = Fraction(0)
                    for p in permutations((al, be, ga)):
                        sym += b[p[0]][p[1]][p[2]]
                    a[al][be][ga] += b[al][be][ga] - sym / 6
    else:
        for al in range(4):
            for be in range(4):
                for ga in range(4):
                    a[al][be][ga] = _rand_fraction(rng)
    idx = [(i, j, k) for i in range(4) for j in range(4) for k in range(4)]
    _normalize_k1(lambda t3: a[t3[0]][t3[1]][t3[2]],
                  lambda t3, v: a[t3[0]][t3[1]].__setitem__(t3[2], v), idx)
    return CubicForm(tuple(tuple(tuple(r) for r in pl) for pl in a))


# ---------------------------------------------------------------------------
# text form files (CLI input)
# ---------------------------------------------------------------------------


def form_from_text(text: str):
    """Rows of rationals p/q; 4 data rows make a quadratic form, 16 rows
    (four 4x4 blocks) a cubic.  A leading 'quadratic'/'cubic' line is
    allowed, '#' starts a comment."""
    rows = []
    kind = None
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower() in ("quadratic", "cubic"):
            kind = line.lower()
            continue
        rows.append([Fraction(tok) for tok in line.split()])
    for r in rows:
        if len(r) != 4:
            raise ValueError("each row must hold 4 rational entries")
    if kind is None:
        kind = "quadratic" if len(rows) == 4 else "cubic"
    if kind == "quadratic":
        if len(rows) != 4:
            raise ValueError("quadratic form needs exactly 4 rows")
        return QuadraticForm(tuple(tuple(r) for r in rows))
    if len(rows) != 16:
        raise ValueError("cubic form needs exactly 16 rows (four 4x4 blocks)")
    blocks = [rows[4 * i: 4 * i + 4] for i in range(4)]
    return CubicForm(tuple(tuple(tuple(r) for r in b) for b in blocks))
