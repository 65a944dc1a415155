"""Exact algebra of the cone vector fields.

Operators are finite sums  sum_mu  c_mu(t,x,s) * d^mu  with multi-indices
mu over (d_t, d_1, d_2, d_3), total order <= 2, and ConeRational
coefficients.  The generating fields are

    d_alpha            the four partials,
    H_a  = x^a d_t + t d_a     (boosts, tangent to the hyperboloids),
    dbar_a = (x^a/t) d_t + d_a (the "good" frame directions),

together with multiplication operators by cone functions.  Composition
uses the Leibniz rule with the cone derivative rules ds/dt = t/s,
ds/dx_a = -x_a/s, so commutators close exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .conerat import (
    CR_ONE,
    CR_S,
    CR_T,
    CR_X,
    CR_ZERO,
    ConeRational,
    Poly,
)

ORDER_CAP = 2


class OrderOverflowError(Exception):
    """Raised when an operation would produce an operator of order > 2."""


def _midx_add(m1, m2):
    return (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2], m1[3] + m2[3])


def _midx_binom(mu, kappa):
    n = 1
    for a, b in zip(mu, kappa):
        n *= comb(a, b)
    return n


def _sub_multi_indices(mu):
    """All kappa <= mu componentwise."""
    out = [()]
    for e in mu:
        out = [k + (i,) for k in out for i in range(e + 1)]
    return [tuple(k) for k in out]


def _deriv(f: ConeRational, mu) -> ConeRational:
    for i in range(4):
        for _ in range(mu[i]):
            f = f.diff(i)
    return f


class LinDiffOp:
    """Linear differential operator of order <= 2 with ConeRational
    coefficients, stored as {multi-index: coefficient}."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None, _cap=ORDER_CAP):
        cl = {}
        if coeffs:
            for m, c in coeffs.items():
                if not c.is_zero():
                    cl[m] = c
        if cl and _cap is not None:
            order = max(sum(m) for m in cl)
            if order > _cap:
                raise OrderOverflowError(f"operator order {order} exceeds cap {_cap}")
        self.coeffs = cl

    # --- constructors ---------------------------------------------------
    @staticmethod
    def zero() -> "LinDiffOp":
        return LinDiffOp()

    @staticmethod
    def partial(alpha: int) -> "LinDiffOp":
        m = [0, 0, 0, 0]
        m[alpha] = 1
        return LinDiffOp({tuple(m): CR_ONE})

    @staticmethod
    def boost(a: int) -> "LinDiffOp":
        """H_a = x^a d_t + t d_a, a in 1..3."""
        return LinDiffOp({(1, 0, 0, 0): CR_X[a - 1], _unit(a): CR_T})

    @staticmethod
    def dbar(a: int) -> "LinDiffOp":
        """dbar_a = (x^a/t) d_t + d_a."""
        return LinDiffOp({(1, 0, 0, 0): CR_X[a - 1] / CR_T, _unit(a): CR_ONE})

    @staticmethod
    def one_frame(alpha: int) -> "LinDiffOp":
        return LinDiffOp.partial(0) if alpha == 0 else LinDiffOp.dbar(alpha)

    @staticmethod
    def mult(f: ConeRational) -> "LinDiffOp":
        return LinDiffOp({(0, 0, 0, 0): f})

    @staticmethod
    def box() -> "LinDiffOp":
        return LinDiffOp(
            {
                (2, 0, 0, 0): CR_ONE,
                (0, 2, 0, 0): CR_ONE.scale(-1),
                (0, 0, 2, 0): CR_ONE.scale(-1),
                (0, 0, 0, 2): CR_ONE.scale(-1),
            }
        )

    # --- ring operations --------------------------------------------------
    def order(self) -> int:
        if not self.coeffs:
            return -1
        return max(sum(m) for m in self.coeffs)

    def __add__(self, other: "LinDiffOp") -> "LinDiffOp":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out[m] + c if m in out else c
        return LinDiffOp(out)

    def __neg__(self) -> "LinDiffOp":
        return LinDiffOp({m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: "LinDiffOp") -> "LinDiffOp":
        return self + (-other)

    def scale(self, f) -> "LinDiffOp":
        if not isinstance(f, ConeRational):
            f = ConeRational.const(Fraction(f))
        return LinDiffOp({m: c * f for m, c in self.coeffs.items()})

    def _compose_raw(self, other: "LinDiffOp", cap) -> "LinDiffOp":
        out: dict = {}
        for mu, a in self.coeffs.items():
            subs = _sub_multi_indices(mu)
            for nu, b in other.coeffs.items():
                for kappa in subs:
                    rest = tuple(m - k for m, k in zip(mu, kappa))
                    coef = a.scale(_midx_binom(mu, kappa)) * _deriv(b, rest)
                    if coef.is_zero():
                        continue
                    idx = _midx_add(kappa, nu)
                    out[idx] = out[idx] + coef if idx in out else coef
        return LinDiffOp(out, _cap=cap)

    def compose(self, other: "LinDiffOp") -> "LinDiffOp":
        """Operator product self . other; raises OrderOverflowError when the
        product does not fit in order 2."""
        return self._compose_raw(other, ORDER_CAP)

    def apply(self, f: ConeRational) -> ConeRational:
        acc = CR_ZERO
        for mu, c in self.coeffs.items():
            acc = acc + c * _deriv(f, mu)
        return acc

    def coefficient(self, mu) -> ConeRational:
        return self.coeffs.get(tuple(mu), CR_ZERO)

    def is_zero(self) -> bool:
        return not self.coeffs

    def n_terms(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, LinDiffOp) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted((m, c.key()) for m, c in self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        names = ("dt", "d1", "d2", "d3")
        parts = []
        for m in sorted(self.coeffs, key=lambda mm: (sum(mm), mm), reverse=True):
            ds = "*".join(f"{names[i]}^{m[i]}" if m[i] > 1 else names[i] for i in range(4) if m[i])
            c = repr(self.coeffs[m])
            parts.append(f"({c})*{ds}" if ds else f"({c})")
        return " + ".join(parts)


def _unit(a: int):
    m = [0, 0, 0, 0]
    m[a] = 1
    return tuple(m)


def commute(A: LinDiffOp, B: LinDiffOp) -> LinDiffOp:
    """A.B - B.A in canonical form.  The two products may transiently
    exceed order 2 (boost against a second-order operator); only the
    commutator itself must fit, otherwise OrderOverflowError."""
    ab = A._compose_raw(B, cap=None)
    ba = B._compose_raw(A, cap=None)
    out = dict(ab.coeffs)
    for m, c in ba.coeffs.items():
        out[m] = out[m] - c if m in out else -c
    return LinDiffOp(out)  # cap enforced here


def verify_identity(lhs: LinDiffOp, rhs: LinDiffOp) -> bool:
    return lhs == rhs


def residual_terms(lhs: LinDiffOp, rhs: LinDiffOp) -> int:
    return (lhs - rhs).n_terms()


# ---------------------------------------------------------------------------
# frame matrices
# ---------------------------------------------------------------------------


class FrameMatrix:
    """4x4 matrix of ConeRational entries."""

    def __init__(self, rows):
        self.rows = [list(r) for r in rows]

    def __getitem__(self, ij):
        return self.rows[ij[0]][ij[1]]

    def matmul(self, other: "FrameMatrix") -> "FrameMatrix":
        out = [[CR_ZERO for _ in range(4)] for _ in range(4)]
        for i in range(4):
            for j in range(4):
                acc = CR_ZERO
                for k in range(4):
                    acc = acc + self.rows[i][k] * other.rows[k][j]
                out[i][j] = acc
        return FrameMatrix(out)

    def is_identity(self) -> bool:
        for i in range(4):
            for j in range(4):
                want = CR_ONE if i == j else CR_ZERO
                if self.rows[i][j] != want:
                    return False
        return True


def frame_matrices():
    """(Phi, Psi): transition between the one-frame and the natural frame,
    underline(d)_alpha = Phi_alpha^beta d_beta, with Psi the exact inverse."""
    phi = [[CR_ZERO for _ in range(4)] for _ in range(4)]
    psi = [[CR_ZERO for _ in range(4)] for _ in range(4)]
    for i in range(4):
        phi[i][i] = CR_ONE
        psi[i][i] = CR_ONE
    for a in (1, 2, 3):
        ratio = CR_X[a - 1] / CR_T
        phi[a][0] = ratio
        psi[a][0] = -ratio
    return FrameMatrix(phi), FrameMatrix(psi)


# ---------------------------------------------------------------------------
# decomposition of the wave operator in the one-frame
# ---------------------------------------------------------------------------

_MINK = {0: Fraction(1), 1: Fraction(-1), 2: Fraction(-1), 3: Fraction(-1)}


@dataclass
class WaveFrameDecomposition:
    """box = sum_ab table[a,b] * frame_a . frame_b + correction."""

    table: dict
    correction: LinDiffOp

    def assembled(self) -> LinDiffOp:
        acc = LinDiffOp.zero()
        for (al, be), c in self.table.items():
            acc = acc + LinDiffOp.mult(c).compose(
                LinDiffOp.one_frame(al).compose(LinDiffOp.one_frame(be))
            )
        return acc + self.correction

    def certify_on_monomials(self, max_degree: int = 4) -> int:
        """Apply box and the assembled right side to every monomial
        t^i x1^j x2^k x3^l of total degree <= max_degree; returns the
        number of monomials with nonzero residual (0 on success)."""
        box = LinDiffOp.box()
        rhs = self.assembled()
        bad = 0
        for i in range(max_degree + 1):
            for j in range(max_degree + 1 - i):
                for k in range(max_degree + 1 - i - j):
                    for l in range(max_degree + 1 - i - j - k):
                        mono = ConeRational(
                            _pf_mono(i, j, k, l)
                        )
                        if not (box.apply(mono) - rhs.apply(mono)).is_zero():
                            bad += 1
        return bad


def _pf_mono(i, j, k, l):
    from .conerat import PolyFrac

    p = Poly({(i, j, k, l): Fraction(1)})
    return PolyFrac.from_poly(p)


def wave_frame_decomposition() -> WaveFrameDecomposition:
    """Exact one-frame coefficients of box = d_tt - Lap and the first-order
    remainder; derived by the engine itself, not copied from anywhere."""
    _, psi = frame_matrices()
    table = {}
    for al in range(4):
        for be in range(4):
            acc = CR_ZERO
            for g in range(4):
                term = psi[g, al] * psi[g, be]
                acc = acc + term.scale(_MINK[g])
            table[(al, be)] = acc
    second = LinDiffOp.zero()
    for (al, be), c in table.items():
        if c.is_zero():
            continue
        second = second + LinDiffOp.mult(c).compose(
            LinDiffOp.one_frame(al).compose(LinDiffOp.one_frame(be))
        )
    correction = LinDiffOp.box() - second
    if correction.order() > 1:
        raise AssertionError("frame decomposition remainder must be first order")
    return WaveFrameDecomposition(table=table, correction=correction)


# ---------------------------------------------------------------------------
# commutator table of {d_alpha, H_a} with closure classification
# ---------------------------------------------------------------------------

FIELD_NAMES = ("dt", "d1", "d2", "d3", "H1", "H2", "H3")


def standard_fields():
    ops = [LinDiffOp.partial(a) for a in range(4)]
    ops += [LinDiffOp.boost(a) for a in (1, 2, 3)]
    return list(zip(FIELD_NAMES, ops))


@dataclass
class CommutatorEntry:
    left: str
    right: str
    op: LinDiffOp
    kind: str  # zero | span | rotation | other
    detail: str


def _poly_const_and_linear(c: ConeRational):
    """For a polynomial ConeRational (s-free, denominator 1) return
    (const, t-coeff, x-coeffs[3]) or None if other monomials appear."""
    if not c.b.is_zero():
        return None
    pf = c.a
    if not pf.den.is_const():
        return None
    scale = pf.den.const_value()
    const = Fraction(0)
    tc = Fraction(0)
    xc = [Fraction(0)] * 3
    for m, coef in pf.num.terms.items():
        coef = coef / scale
        if m == (0, 0, 0, 0):
            const = coef
        elif m == (1, 0, 0, 0):
            tc = coef
        elif sum(m) == 1:
            xc[m.index(1) - 1] = coef
        else:
            return None
    return const, tc, xc


def classify_commutator(op: LinDiffOp) -> tuple:
    """Classify an order <= 1 operator as a constant combination of
    {d_alpha, H_a}, a spatial rotation x^a d_b - x^b d_a, or other."""
    if op.is_zero():
        return "zero", ""
    if op.order() > 1 or not op.coefficient((0, 0, 0, 0)).is_zero():
        return "other", "order or zeroth-order term out of pattern"
    parsed = {}
    for a in range(4):
        p = _poly_const_and_linear(op.coefficient(_unit(a)))
        if p is None:
            return "other", "non-linear coefficient"
        parsed[a] = p
    # spatial coefficients: const c_a + t d_a + x-linear rotation part
    boosts = [parsed[a][1] for a in (1, 2, 3)]
    consts = [parsed[a][0] for a in (1, 2, 3)]
    rot = [parsed[a][2] for a in (1, 2, 3)]  # rot[a-1][b-1] = coeff of x^b in d_a
    # time coefficient must be c_0 + sum_a d_a x^a, nothing else
    c0, t0, x0 = parsed[0]
    if t0 != 0 or any(x0[a] != boosts[a] for a in range(3)):
        return "other", "time coefficient incompatible with boost span"
    span_terms = []
    if c0:
        span_terms.append(f"{c0}*dt")
    for a in range(3):
        if consts[a]:
            span_terms.append(f"{consts[a]}*d{a+1}")
        if boosts[a]:
            span_terms.append(f"{boosts[a]}*H{a+1}")
    rot_terms = []
    for a in range(3):
        if rot[a][a] != 0:
            return "other", "diagonal x-coefficient"
        for b in range(a + 1, 3):
            if rot[a][b] != -rot[b][a]:
                return "other", "x-linear part not antisymmetric"
            if rot[b][a]:
                rot_terms.append(f"{rot[b][a]}*(x{a+1}*d{b+1}-x{b+1}*d{a+1})")
    if rot_terms and span_terms:
        return "other", "mixed span and rotation"
    if rot_terms:
        return "rotation", " + ".join(rot_terms)
    return "span", " + ".join(span_terms)


def commutator_table():
    fields = standard_fields()
    entries = []
    for ln, lop in fields:
        for rn, rop in fields:
            c = commute(lop, rop)
            kind, detail = classify_commutator(c)
            entries.append(CommutatorEntry(ln, rn, c, kind, detail))
    return entries


def closure_deviation(entries) -> list:
    """Entries whose commutator leaves the span of {d_alpha, H_a}: these
    are the boost-boost rotations, which the advertised closure property
    of the field family does not cover."""
    return [e for e in entries if e.kind == "rotation"]


# ---------------------------------------------------------------------------
# identity corpus
# ---------------------------------------------------------------------------


@dataclass
class IdentityResult:
    identity_id: str
    status: str  # pass | fail
    residual_terms: int


def _ratio(a: int) -> ConeRational:
    return CR_X[a - 1] / CR_T


def _weight_st() -> ConeRational:
    return CR_S / CR_T


def identity_corpus():
    """The shipped list of (id, lhs, rhs) operator identities.  Entries with
    an `_exact` suffix encode the exactly-derived form where the customary
    display involves a slice-label reading or an index slip; the decisions
    ledger records the mapping."""
    ops = {}

    dt = LinDiffOp.partial(0)
    dx = {a: LinDiffOp.partial(a) for a in (1, 2, 3)}
    H = {a: LinDiffOp.boost(a) for a in (1, 2, 3)}
    db = {a: LinDiffOp.dbar(a) for a in (1, 2, 3)}
    st = _weight_st()
    inv_t = CR_ONE / CR_T

    for a in (1, 2, 3):
        for b in (1, 2, 3):
            ops[f"boost_dbar_{a}{b}"] = (
                commute(H[a], db[b]),
                db[a].scale(-_ratio(b)),
            )
            delta = CR_ONE if a == b else CR_ZERO
            ops[f"boost_partial_{a}{b}"] = (
                commute(H[a], dx[b]),
                dt.scale(-delta),
            )
    for a in (1, 2, 3):
        ops[f"boost_partial_t{a}"] = (commute(H[a], dt), -dx[a])

    # boosts against the (s/t)-weighted partials
    for a in (1, 2, 3):
        weighted_dt = LinDiffOp.mult(st).compose(dt)
        ops[f"boost_weighted_dt_{a}"] = (
            commute(H[a], weighted_dt),
            -(dx[a].scale(st) + dt.scale(st * _ratio(a))),
        )
        for b in (1, 2, 3):
            weighted_db = LinDiffOp.mult(st).compose(dx[b])
            delta = CR_ONE if a == b else CR_ZERO
            ops[f"boost_weighted_dx_{a}{b}_exact"] = (
                commute(H[a], weighted_db),
                -(dt.scale(st * delta) + dx[b].scale(st * _ratio(a))),
            )

    # partials against dbar
    for a in (1, 2, 3):
        for b in (1, 2, 3):
            delta = CR_ONE if a == b else CR_ZERO
            ops[f"partial_dbar_{b}{a}"] = (
                commute(dx[b], db[a]),
                dt.scale(delta * inv_t),
            )
        ops[f"partial_dbar_t{a}"] = (
            commute(dt, db[a]),
            dt.scale(-(inv_t * _ratio(a))),
        )

    # partials against the (s/t)-weighted partials; the exact commutator
    # carries d(s/t)/dt = r^2/(s t^2), while the slice-label reading treats
    # the weight's s as a constant and gives -(1/t)(s/t)
    r2_over_st2 = ConeRational.from_string("(x1^2+x2^2+x3^2)/(s*t^2)")
    for al in range(4):
        pal = dt if al == 0 else dx[al]
        weighted = LinDiffOp.mult(st).compose(pal)
        ops[f"weighted_time_comm_{al}_exact"] = (
            commute(dt, weighted),
            pal.scale(r2_over_st2),
        )
        label_weighted = LinDiffOp.mult(inv_t).compose(pal)
        ops[f"weighted_time_comm_{al}_slicelabel"] = (
            commute(dt, label_weighted),
            pal.scale(-(inv_t * inv_t)),
        )
        for a in (1, 2, 3):
            ops[f"weighted_spatial_comm_{a}{al}"] = (
                commute(dx[a], weighted),
                pal.scale(-(CR_X[a - 1] / (CR_S * CR_T))),
            )

    # boosts against second-order partials
    for a in (1, 2, 3):
        for b in (1, 2, 3):
            for c in (1, 2, 3):
                dbc = dx[b].compose(dx[c])
                rhs = LinDiffOp.zero()
                if a == b:
                    rhs = rhs - dt.compose(dx[c])
                if a == c:
                    rhs = rhs - dt.compose(dx[b])
                ops[f"boost_2spatial_{a}{b}{c}"] = (commute(H[a], dbc), rhs)
            dtb = dt.compose(dx[b])
            rhs = -(dx[a].compose(dx[b]))
            if a == b:
                rhs = rhs - dt.compose(dt)
            ops[f"boost_time_spatial_{a}{b}_exact"] = (commute(H[a], dtb), rhs)
        ops[f"boost_2time_{a}_exact"] = (
            commute(H[a], dt.compose(dt)),
            dt.compose(dx[a]).scale(ConeRational.const(-2)),
        )

    # box is invariant
    box = LinDiffOp.box()
    for al in range(4):
        pal = dt if al == 0 else dx[al]
        ops[f"wave_killing_d{al}"] = (commute(pal, box), LinDiffOp.zero())
    for a in (1, 2, 3):
        ops[f"wave_killing_H{a}"] = (commute(H[a], box), LinDiffOp.zero())

    # function identities, encoded through apply()
    fn = {}
    for a in (1, 2, 3):
        for b in (1, 2, 3):
            delta = CR_ONE if a == b else CR_ZERO
            fn[f"fn_boost_ratio_{b}{a}"] = (
                H[b].apply(_ratio(a)),
                -(_ratio(a) * _ratio(b)) + delta,
            )
            fn[f"fn_dx_ratio_{b}{a}"] = (dx[b].apply(_ratio(a)), delta * inv_t)
        fn[f"fn_dt_ratio_{a}"] = (dt.apply(_ratio(a)), -(inv_t * _ratio(a)))
        fn[f"fn_boost_invt_{a}"] = (H[a].apply(inv_t), -(inv_t * _ratio(a)))
        fn[f"fn_boost_s_{a}"] = (H[a].apply(CR_S), CR_ZERO)
    fn["fn_dt_invt"] = (dt.apply(inv_t), -(inv_t * inv_t))

    return ops, fn


def run_identity_corpus():
    ops, fn = identity_corpus()
    results = []
    for name in sorted(ops):
        lhs, rhs = ops[name]
        n_bad = residual_terms(lhs, rhs)
        results.append(IdentityResult(name, "pass" if n_bad == 0 else "fail", n_bad))
    for name in sorted(fn):
        lhs, rhs = fn[name]
        diff = lhs - rhs
        n_bad = 0 if diff.is_zero() else 1
        results.append(IdentityResult(name, "pass" if n_bad == 0 else "fail", n_bad))
    return results
