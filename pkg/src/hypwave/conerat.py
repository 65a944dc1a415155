"""Exact rational-function arithmetic on the interior of the light cone.

Elements live in the field Q(t, x1, x2, x3)[s] with the single relation

    s**2 = t**2 - x1**2 - x2**2 - x3**2,

so every value has a unique representation  a + b*s  with a, b ordinary
rational functions of (t, x1, x2, x3).  Both parts are kept as reduced
fractions of sparse polynomials with Fraction coefficients; the canonical
form is therefore unique and two values are equal iff their canonical
forms are identical.

Monomial order is graded lexicographic in (t, x1, x2, x3), with the s-part
listed after the s-free part.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

NVARS = 4  # t, x1, x2, x3
VAR_NAMES = ("t", "x1", "x2", "x3")
_ZERO_MONO = (0, 0, 0, 0)


def _grlex_key(mono):
    return (sum(mono), mono)


class Poly:
    """Sparse polynomial in (t, x1, x2, x3) over Fraction."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        if terms:
            self.terms = {m: c for m, c in terms.items() if c != 0}
        else:
            self.terms = {}

    @staticmethod
    def const(c) -> "Poly":
        c = Fraction(c)
        return Poly({_ZERO_MONO: c} if c else {})

    @staticmethod
    def var(i: int, power: int = 1) -> "Poly":
        mono = [0] * NVARS
        mono[i] = power
        return Poly({tuple(mono): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _ZERO_MONO in self.terms)

    def const_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        return self.terms[_ZERO_MONO]

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v:
                    out[m] = v
                else:
                    del out[m]
        p = Poly()
        p.terms = out
        return p

    def __neg__(self) -> "Poly":
        p = Poly()
        p.terms = {m: -c for m, c in self.terms.items()}
        return p

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2], m1[3] + m2[3])
                c = c1 * c2
                v = out.get(m)
                if v is None:
                    out[m] = c
                else:
                    v = v + c
                    if v:
                        out[m] = v
                    else:
                        del out[m]
        p = Poly()
        p.terms = out
        return p

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly()
        p = Poly()
        p.terms = {m: cc * c for m, cc in self.terms.items()}
        return p

    def diff(self, i: int) -> "Poly":
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                mm = list(m)
                mm[i] = e - 1
                out[tuple(mm)] = c * e
        p = Poly()
        p.terms = out
        return p

    def mono_gcd(self):
        """Componentwise min exponent over all terms."""
        it = iter(self.terms)
        g = list(next(it))
        for m in it:
            for i in range(NVARS):
                if m[i] < g[i]:
                    g[i] = m[i]
        return tuple(g)

    def shift_down(self, mono) -> "Poly":
        p = Poly()
        p.terms = {
            (m[0] - mono[0], m[1] - mono[1], m[2] - mono[2], m[3] - mono[3]): c
            for m, c in self.terms.items()
        }
        return p

    def content_and_sign(self):
        """Positive rational c and sign such that self/(sign*c) is primitive
        with positive leading (grlex) coefficient."""
        nums = [abs(c.numerator) for c in self.terms.values()]
        dens = [c.denominator for c in self.terms.values()]
        g = 0
        for n in nums:
            g = gcd(g, n)
        l = 1
        for d in dens:
            l = lcm(l, d)
        content = Fraction(g, l)
        lead = max(self.terms, key=_grlex_key)
        sign = 1 if self.terms[lead] > 0 else -1
        return content, sign

    def sorted_terms(self):
        return tuple(sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True))

    def eval(self, vals):
        """Exact evaluation; vals is a length-4 sequence of Fractions."""
        acc = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for i in range(NVARS):
                if m[i]:
                    v = v * vals[i] ** m[i]
            acc += v
        return acc

    def to_sympy(self):
        import sympy

        syms = sympy.symbols(" ".join(VAR_NAMES))
        expr = sympy.Integer(0)
        for m, c in self.terms.items():
            term = sympy.Rational(c.numerator, c.denominator)
            for i in range(NVARS):
                if m[i]:
                    term *= syms[i] ** m[i]
            expr += term
        return expr

    @staticmethod
    def from_sympy(expr) -> "Poly":
        import sympy

        syms = sympy.symbols(" ".join(VAR_NAMES))
        p = sympy.Poly(sympy.expand(expr), *syms)
        out = {}
        for mono, coeff in zip(p.monoms(), p.coeffs()):
            q = sympy.Rational(coeff)
            out[tuple(mono)] = Fraction(int(q.p), int(q.q))
        return Poly(out)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(self.sorted_terms())

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            vs = "*".join(
                f"{VAR_NAMES[i]}^{m[i]}" if m[i] > 1 else VAR_NAMES[i]
                for i in range(NVARS)
                if m[i]
            )
            if vs:
                parts.append(f"{c}*{vs}" if c != 1 else vs)
            else:
                parts.append(str(c))
        return " + ".join(parts)


ONE = Poly.const(1)
# s**2 identifies with this polynomial
E_POLY = Poly.var(0, 2) - Poly.var(1, 2) - Poly.var(2, 2) - Poly.var(3, 2)


def _poly_gcd_fallback(p: Poly, q: Poly) -> Poly:
    """Full multivariate gcd via sympy; used only when both args have
    several terms (the monomial fast path covers everything else)."""
    import sympy

    syms = sympy.symbols(" ".join(VAR_NAMES))
    g = sympy.gcd(sympy.Poly(p.to_sympy(), *syms), sympy.Poly(q.to_sympy(), *syms))
    return Poly.from_sympy(g.as_expr())


def _poly_exquo(p: Poly, g: Poly) -> Poly:
    import sympy

    syms = sympy.symbols(" ".join(VAR_NAMES))
    q = sympy.exquo(sympy.Poly(p.to_sympy(), *syms), sympy.Poly(g.to_sympy(), *syms))
    return Poly.from_sympy(q.as_expr())


class PolyFrac:
    """Reduced fraction of two Polys; canonical up to nothing (the
    denominator is primitive with positive leading coefficient)."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly = ONE, _reduced: bool = False):
        if den.is_zero():
            raise ZeroDivisionError("polynomial denominator is zero")
        if num.is_zero():
            self.num, self.den = Poly(), ONE
            return
        if not _reduced:
            num, den = self._reduce(num, den)
        self.num, self.den = num, den

    @staticmethod
    def _reduce(num: Poly, den: Poly):
        gn = num.mono_gcd()
        gd = den.mono_gcd()
        common = tuple(min(a, b) for a, b in zip(gn, gd))
        if any(common):
            num = num.shift_down(common)
            den = den.shift_down(common)
        if not (num.is_monomial() or den.is_monomial()):
            g = _poly_gcd_fallback(num, den)
            if g.degree() > 0:
                num = _poly_exquo(num, g)
                den = _poly_exquo(den, g)
        content, sign = den.content_and_sign()
        factor = 1 / (content * sign)
        den = den.scale(factor)
        num = num.scale(factor)
        return num, den

    @staticmethod
    def const(c) -> "PolyFrac":
        return PolyFrac(Poly.const(c), ONE, _reduced=True)

    @staticmethod
    def from_poly(p: Poly) -> "PolyFrac":
        return PolyFrac(p, ONE)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other: "PolyFrac") -> "PolyFrac":
        if self.den == other.den:
            return PolyFrac(self.num + other.num, self.den)
        return PolyFrac(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> "PolyFrac":
        out = PolyFrac.__new__(PolyFrac)
        out.num, out.den = -self.num, self.den
        return out

    def __sub__(self, other: "PolyFrac") -> "PolyFrac":
        return self + (-other)

    def __mul__(self, other: "PolyFrac") -> "PolyFrac":
        return PolyFrac(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "PolyFrac") -> "PolyFrac":
        if other.is_zero():
            raise ZeroDivisionError("division by zero PolyFrac")
        return PolyFrac(self.num * other.den, self.den * other.num)

    def diff(self, i: int) -> "PolyFrac":
        # (n/d)' = (n'd - nd')/d^2
        return PolyFrac(
            self.num.diff(i) * self.den - self.num * self.den.diff(i),
            self.den * self.den,
        )

    def eval(self, vals) -> Fraction:
        d = self.den.eval(vals)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at evaluation point")
        return self.num.eval(vals) / d

    def key(self):
        return (self.num.sorted_terms(), self.den.sorted_terms())

    def __eq__(self, other):
        return isinstance(other, PolyFrac) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        if self.den == ONE:
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"


_PF_ZERO = PolyFrac.const(0)
_PF_E = PolyFrac.from_poly(E_POLY)


class ConeRational:
    """Value a + b*s with a, b rational functions of (t, x1, x2, x3) and
    s**2 = t**2 - |x|**2.  Canonical: a and b are reduced fractions, so
    equality is structural."""

    __slots__ = ("a", "b")

    def __init__(self, a: PolyFrac, b: PolyFrac = _PF_ZERO):
        self.a = a
        self.b = b

    # --- constructors -------------------------------------------------
    @staticmethod
    def const(c) -> "ConeRational":
        return ConeRational(PolyFrac.const(c))

    @staticmethod
    def var(name: str) -> "ConeRational":
        if name == "s":
            return ConeRational(_PF_ZERO, PolyFrac.const(1))
        i = VAR_NAMES.index(name)
        return ConeRational(PolyFrac.from_poly(Poly.var(i)))

    @staticmethod
    def from_string(text: str) -> "ConeRational":
        """Parse an expression in t, x1..x3, s (sympy syntax, ^ allowed)."""
        import sympy

        syms = {n: sympy.Symbol(n) for n in VAR_NAMES + ("s",)}
        expr = sympy.sympify(text.replace("^", "**"), locals=syms)
        return ConeRational.from_sympy(expr)

    @staticmethod
    def from_sympy(expr) -> "ConeRational":
        import sympy

        s = sympy.Symbol("s")
        expr = sympy.together(sympy.expand(expr))
        num, den = sympy.fraction(expr)
        num = sympy.expand(num)
        den = sympy.expand(den)
        e_sym = Poly.to_sympy(E_POLY)

        def split_s(p):
            p = sympy.Poly(p, s)
            a = sympy.Integer(0)
            b = sympy.Integer(0)
            for (k,), c in zip(p.monoms(), p.coeffs()):
                red = c * e_sym ** (k // 2)
                if k % 2:
                    b += red
                else:
                    a += red
            return sympy.expand(a), sympy.expand(b)

        na, nb = split_s(num)
        da, db = split_s(den)
        # clear s from the denominator with the conjugate da - db*s
        if db != 0:
            conj_num_a = na * da - nb * db * e_sym
            conj_num_b = nb * da - na * db
            dd = sympy.expand(da * da - db * db * e_sym)
            na, nb = sympy.expand(conj_num_a), sympy.expand(conj_num_b)
            da = dd
        d_poly = Poly.from_sympy(da)
        return ConeRational(
            PolyFrac(Poly.from_sympy(na), d_poly),
            PolyFrac(Poly.from_sympy(nb), d_poly),
        )

    # --- arithmetic ---------------------------------------------------
    def __add__(self, other: "ConeRational") -> "ConeRational":
        return ConeRational(self.a + other.a, self.b + other.b)

    def __neg__(self) -> "ConeRational":
        return ConeRational(-self.a, -self.b)

    def __sub__(self, other: "ConeRational") -> "ConeRational":
        return ConeRational(self.a - other.a, self.b - other.b)

    def __mul__(self, other: "ConeRational") -> "ConeRational":
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        return ConeRational(a1 * a2 + b1 * b2 * _PF_E, a1 * b2 + b1 * a2)

    def inverse(self) -> "ConeRational":
        d = self.a * self.a - self.b * self.b * _PF_E
        if d.is_zero():
            raise ZeroDivisionError("inverse of zero ConeRational")
        return ConeRational(self.a / d, -(self.b / d))

    def __truediv__(self, other: "ConeRational") -> "ConeRational":
        return self * other.inverse()

    def scale(self, c) -> "ConeRational":
        cf = PolyFrac.const(c)
        return ConeRational(self.a * cf, self.b * cf)

    # --- cone calculus ------------------------------------------------
    def diff(self, direction: int) -> "ConeRational":
        """Partial derivative; direction 0 is t, 1..3 are x1..x3.
        Uses d s/dt = t/s and d s/dx_a = -x_a/s."""
        if direction == 0:
            extra = self.b * PolyFrac.from_poly(Poly.var(0)) / _PF_E
            return ConeRational(self.a.diff(0), self.b.diff(0) + extra)
        extra = self.b * PolyFrac.from_poly(Poly.var(direction)) / _PF_E
        return ConeRational(self.a.diff(direction), self.b.diff(direction) - extra)

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def eval(self, t, x1, x2, x3, s) -> Fraction:
        """Exact evaluation; the caller must pass s with s**2 = t**2-|x|**2."""
        vals = (Fraction(t), Fraction(x1), Fraction(x2), Fraction(x3))
        s = Fraction(s)
        if s * s != E_POLY.eval(vals):
            raise ValueError("evaluation point does not satisfy s^2 = t^2 - |x|^2")
        return self.a.eval(vals) + s * self.b.eval(vals)

    def eval_float(self, t, x1, x2, x3) -> float:
        import math

        vals = (Fraction(t), Fraction(x1), Fraction(x2), Fraction(x3))
        e = E_POLY.eval(vals)
        if e < 0:
            raise ValueError("point outside the cone")
        s = math.sqrt(float(e))
        return float(self.a.eval(vals)) + s * float(self.b.eval(vals))

    def key(self):
        return (self.a.key(), self.b.key())

    def canonicalize(self) -> "ConeRational":
        """Re-normalize from scratch (idempotent; used by property tests)."""
        return ConeRational(
            PolyFrac(self.a.num, self.a.den), PolyFrac(self.b.num, self.b.den)
        )

    @property
    def numerator(self) -> Poly:
        """Combined numerator a_n*b_d + b_n*a_d*s, reported as the pair of
        s-free/s-linear parts over the common denominator."""
        return (self.a.num * self.b.den, self.b.num * self.a.den)

    @property
    def denominator(self) -> Poly:
        return self.a.den * self.b.den

    def to_sympy(self):
        import sympy

        s = sympy.Symbol("s")
        return self.a.num.to_sympy() / self.a.den.to_sympy() + s * (
            self.b.num.to_sympy() / self.b.den.to_sympy()
        )

    def __eq__(self, other):
        return (
            isinstance(other, ConeRational)
            and self.a == other.a
            and self.b == other.b
        )

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        if self.b.is_zero():
            return repr(self.a)
        if self.a.is_zero():
            return f"({self.b!r})*s"
        return f"{self.a!r} + ({self.b!r})*s"


# convenient shared atoms
CR_ZERO = ConeRational.const(0)
CR_ONE = ConeRational.const(1)
CR_T = ConeRational.var("t")
CR_S = ConeRational.var("s")
CR_X = tuple(ConeRational.var(f"x{i}") for i in (1, 2, 3))
