"""Slice diagnostics: hyperboloid energies, weighted norms, decay fits.

The slice energy of a field w with mass D is the integral over the slice of

    |d_t w|^2 + sum_a |d_a w|^2 + 2 (x^a/t) d_t w d_a w + (D w)^2,

which also equals the "good derivative" groupings in terms of dbar_a and
(s/t) d_alpha; all three forms are evaluated and must agree pointwise.
For the summed spatial/boost derivative words of a radial field the
angular factors integrate to the extra (g/r)^2 terms carried by the V/W
field classes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hypergeom import FieldS, FieldV, FieldW, SliceData, WORDS, integrate, word_order

FORMS_RTOL = 1.0e-9


class MissingDerivativeError(Exception):
    pass


def density_forms(wt, wr, w, r, t, s, D=0.0):
    """The three equivalent scalar energy densities (arrays or scalars)."""
    mass = (D * w) * (D * w)
    f1 = wt * wt + wr * wr + 2.0 * (r / t) * wt * wr + mass
    f2 = ((r / t) * wt + wr) ** 2 + ((s / t) * wt) ** 2 + mass
    f3 = ((s / t) * wr) ** 2 + ((r / t) * wr + wt) ** 2 + mass
    return f1, f2, f3


def _building_blocks(fld):
    """(P, G, X): time square, gradient square and cross term of the
    angular-reduced energy density."""
    if isinstance(fld, FieldS):
        return fld.gt**2, fld.gr**2, 2.0 * fld.gt * fld.gr
    if isinstance(fld, FieldV):
        return fld.gt**2, fld.gr**2 + 2.0 * fld.g_over_r**2, 2.0 * fld.gt * fld.gr
    if isinstance(fld, FieldW):
        p = fld.g2t**2 + 2.0 * fld.g2t * fld.g0t + 3.0 * fld.g0t**2
        g = (
            fld.g2r**2
            + 4.0 * fld.g2_over_r**2
            + 3.0 * fld.g0r**2
            + 2.0 * fld.g2r * fld.g0r
        )
        x = 2.0 * (
            fld.g2t * fld.g2r
            + fld.g2t * fld.g0r
            + fld.g0t * fld.g2r
            + 3.0 * fld.g0t * fld.g0r
        )
        return p, g, x
    raise TypeError(f"unknown field class {type(fld)!r}")


def energy_density(fld, r, t, s, D=0.0, form: int = 1):
    p, g, x = _building_blocks(fld)
    mass = D * D * fld.l2_density()
    rt = r / t
    st = s / t
    if form == 1:
        return p + g + rt * x + mass
    if form == 2:
        return st**2 * p + (rt**2 * p + rt * x + g) + mass
    if form == 3:
        return st**2 * g + (rt**2 * g + rt * x + p) + mass
    raise ValueError("form must be 1, 2 or 3")


def energy_m(slice_data: SliceData, component: int, word: str = "", D: float = 0.0,
             check_forms: bool = True) -> float:
    """Slice energy of the derivative word of one component."""
    fields = slice_data.component(component)
    if word not in fields:
        raise MissingDerivativeError(
            f"word {word!r} not extracted (max order {slice_data.max_order})"
        )
    fld = fields[word]
    slc = slice_data.slice
    d1 = energy_density(fld, slc.r, slc.t, slc.s, D, form=1)
    if check_forms:
        d2 = energy_density(fld, slc.r, slc.t, slc.s, D, form=2)
        d3 = energy_density(fld, slc.r, slc.t, slc.s, D, form=3)
        scale = float(np.max(d1)) if len(d1) else 0.0
        tol = FORMS_RTOL * max(1.0, scale)
        if len(d1) and (np.max(np.abs(d1 - d2)) > tol or np.max(np.abs(d1 - d3)) > tol):
            raise AssertionError("equivalent energy density forms disagree")
    return integrate(slc, d1)


def l2_norm_sq(slice_data: SliceData, component: int, word: str = "") -> float:
    fields = slice_data.component(component)
    if word not in fields:
        raise MissingDerivativeError(f"word {word!r} not extracted")
    return integrate(slice_data.slice, fields[word].l2_density())


# ---------------------------------------------------------------------------
# curved energy
# ---------------------------------------------------------------------------


def principal_values(slice_data: SliceData, spec) -> tuple:
    """(g00, gxx) arrays of shape (ncomp, ncomp, n_nodes): the field-dependent
    principal coefficients reconstructed from the system description."""
    n = spec.n_components
    m = slice_data.slice.n_nodes()
    g00 = np.zeros((n, n, m))
    gxx = np.zeros((n, n, m))
    vals = [slice_data.component(k)[""].g for k in range(n)]
    vts = [slice_data.component(k)["t"].g for k in range(n)]
    for (i, j, k), (att, axx) in spec.radial_a().items():
        g00[i, j] += att * vts[k]
        gxx[i, j] += axx * vts[k]
    for (i, j, k), (btt, bxx) in spec.radial_b().items():
        g00[i, j] += btt * vals[k]
        gxx[i, j] += bxx * vals[k]
    return g00, gxx


def energy_g(slice_data: SliceData, spec, component: int, word: str = "") -> tuple:
    """Curved slice energy: E_m plus the principal-part correction, and the
    comparability ratio E_G/E_m (with the [1/3, 3] flag)."""
    i = component
    D = spec.masses[i]
    em = energy_m(slice_data, i, word, D)
    g00, gxx = principal_values(slice_data, spec)
    slc = slice_data.slice
    rt = slc.r / slc.t
    fi = slice_data.component(i)[word]
    corr = np.zeros(slc.n_nodes())
    for j in range(spec.n_components):
        fj = slice_data.component(j)[word]
        # 2 (G^{0b} dt w_i db w_j) . (1, -x^a/t) - G^{ab} da w_i db w_j,
        # radially: g00 wt_i wt_j - 2 (r/t) gxx wt_i wr_j + gxx wr_i wr_j
        corr += (
            g00[i, j] * fi.gt * fj.gt
            - 2.0 * rt * gxx[i, j] * fi.gt * fj.gr
            + gxx[i, j] * fi.gr * fj.gr
        )
    eg = em + integrate(slc, corr)
    ratio = eg / em if em > 0 else 1.0
    return eg, ratio, bool(1.0 / 3.0 <= ratio <= 3.0)


# ---------------------------------------------------------------------------
# sources and the energy inequality
# ---------------------------------------------------------------------------


def source_values(slice_data: SliceData, spec, component: int) -> np.ndarray:
    """F_i on the slice nodes from the semilinear coefficient blocks."""
    i = component
    n = spec.n_components
    vals = [slice_data.component(k)[""].g for k in range(n)]
    vts = [slice_data.component(k)["t"].g for k in range(n)]
    vrs = [slice_data.component(k)["x"].g for k in range(n)]
    out = np.zeros(slice_data.slice.n_nodes())
    for (ii, j, k), (ptt, pxx) in spec.radial_p().items():
        if ii == i:
            out += ptt * vts[j] * vts[k] + pxx * vrs[j] * vrs[k]
    for (ii, j, k), qt in spec.radial_q().items():
        if ii == i:
            out += qt * vals[k] * vts[j]
    for (ii, j, k), rr in spec.radial_r().items():
        if ii == i:
            out += rr * vals[j] * vals[k]
    return out


def source_l2(slice_data: SliceData, spec, component: int) -> float:
    f = source_values(slice_data, spec, component)
    return float(np.sqrt(max(integrate(slice_data.slice, f * f), 0.0)))


def principal_flux_bound(slice_data: SliceData, spec) -> float:
    """M(s): the weighted principal-part flux integral normalized by the
    total root energy; zero for semilinear systems."""
    if not (spec.radial_a() or spec.radial_b()):
        return 0.0
    n = spec.n_components
    slc = slice_data.slice
    st = slc.s / slc.t
    m = slc.n_nodes()
    # time and radial derivatives of the principal coefficients
    vts = [slice_data.component(k)["t"].g for k in range(n)]
    vtts = [slice_data.component(k)["tt"].g for k in range(n)]
    vtrs = [slice_data.component(k)["tx"].g for k in range(n)]
    vrs = [slice_data.component(k)["x"].g for k in range(n)]
    g00_t = np.zeros((n, n, m))
    gxx_t = np.zeros((n, n, m))
    gxx_r = np.zeros((n, n, m))
    for (i, j, k), (att, axx) in spec.radial_a().items():
        g00_t[i, j] += att * vtts[k]
        gxx_t[i, j] += axx * vtts[k]
        gxx_r[i, j] += axx * vtrs[k]
    for (i, j, k), (btt, bxx) in spec.radial_b().items():
        g00_t[i, j] += btt * vts[k]
        gxx_t[i, j] += bxx * vts[k]
        gxx_r[i, j] += bxx * vrs[k]
    worst = 0.0
    for i in range(n):
        fi = slice_data.component(i)[""]
        em_i = energy_m(slice_data, i, "", spec.masses[i], check_forms=False)
        acc = np.zeros(slc.n_nodes())
        for j in range(n):
            fj = slice_data.component(j)[""]
            # d_alpha G^{alpha beta} contracted with dt w_i dbeta w_j:
            # the isotropic spatial block contributes (d_r gxx) wt_i wr_j
            acc += g00_t[i, j] * fi.gt * fj.gt
            acc += gxx_r[i, j] * fi.gt * fj.gr
            # -(1/2) dt G^{alpha beta} dalpha w_i dbeta w_j
            acc -= 0.5 * (g00_t[i, j] * fi.gt * fj.gt + gxx_t[i, j] * fi.gr * fj.gr)
        worst = max(worst, abs(integrate(slc, st * acc)) / np.sqrt(max(em_i, 1e-300)))
    return float(worst)


@dataclass
class EnergyRecord:
    """Per-slice analysis record: energies by (component, word), weighted
    sups by (component, quantity, weight)."""

    s: float
    energy_m: dict
    energy_g: dict
    sups: dict


@dataclass
class InequalityCheck:
    s: np.ndarray
    residual: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray


def energy_inequality_check(s_values, total_root_energy, source_norms,
                            flux_bounds=None, n_components: int = 1) -> InequalityCheck:
    """residual(s) = sqrt(sum E_m)(s) - [sqrt(sum E_m)(s0)
                    + sqrt(3) int (sum L_i + sqrt(n0) M) dtau]; the
    inequality direction requires residual <= 0 up to numerics."""
    s = np.asarray(s_values, dtype=float)
    if len(s) < 2 or np.any(np.diff(s) <= 0):
        raise ValueError("need an increasing grid of at least two s values")
    lhs = np.asarray(total_root_energy, dtype=float)
    L = np.asarray(source_norms, dtype=float)
    M = np.zeros_like(L) if flux_bounds is None else np.asarray(flux_bounds, dtype=float)
    integrand = L + np.sqrt(n_components) * M
    integral = np.concatenate(
        ([0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(s)))
    )
    rhs = lhs[0] + np.sqrt(3.0) * integral
    return InequalityCheck(s=s, residual=lhs - rhs, lhs=lhs, rhs=rhs)


# ---------------------------------------------------------------------------
# pointwise-versus-L2 functional checks
# ---------------------------------------------------------------------------


def sobolev_check(slice_data: SliceData, component: int = 0) -> float:
    """sup t^3 |u|^2 over the slice against the summed squared L2 norms of
    the derivative words with |I| <= 2."""
    fields = slice_data.component(component)
    for w in WORDS:
        if w not in fields:
            raise MissingDerivativeError(f"sobolev check needs word {w!r}")
    slc = slice_data.slice
    u = fields[""].g
    num = float(np.max(slc.t**3 * u * u)) if len(u) else 0.0
    den = sum(l2_norm_sq(slice_data, component, w) for w in WORDS)
    if den <= 0.0:
        return 0.0
    return num / den


def hardy_check(slice_data: SliceData, component: int, word: str,
                D: float = 0.0) -> float:
    """L2 of t^{-1} (word field) against the summed energies of the words
    one order lower; the word must contain at least one derivative."""
    k = word_order(word)
    if k < 1:
        raise ValueError("hardy check needs a derivative word (|I| >= 1)")
    fields = slice_data.component(component)
    if word not in fields:
        raise MissingDerivativeError(f"word {word!r} not extracted")
    slc = slice_data.slice
    num = integrate(slc, fields[word].l2_density() / (slc.t * slc.t))
    den = sum(
        energy_m(slice_data, component, w, D, check_forms=False)
        for w in WORDS
        if word_order(w) <= k - 1 and w in fields
    )
    if den <= 0.0:
        return 0.0
    return num / den


# ---------------------------------------------------------------------------
# weighted sups and exponent fits
# ---------------------------------------------------------------------------

WEIGHTS = ("t32", "st12", "st32", "one")


def _weight_array(slc, weight: str):
    if weight == "t32":
        return slc.t**1.5
    if weight == "st12":
        return slc.s * slc.t**0.5
    if weight == "st32":
        return slc.s * slc.t**1.5
    if weight == "one":
        return np.ones_like(slc.t)
    raise ValueError(f"unknown weight {weight!r}; supported: {WEIGHTS}")


QUANTITIES = ("value", "dt", "dx", "grad", "dbar", "dbar_dt", "ddtt_ts2")


def quantity_values(slice_data: SliceData, component: int, quantity: str) -> np.ndarray:
    f = slice_data.component(component)
    slc = slice_data.slice
    rt = slc.r / slc.t
    if quantity == "value":
        return np.abs(f[""].g)
    if quantity == "dt":
        return np.abs(f["t"].g)
    if quantity == "dx":
        return np.abs(f["x"].g)
    if quantity == "grad":
        return np.maximum(np.abs(f["t"].g), np.abs(f["x"].g))
    if quantity == "dbar":
        return np.abs(rt * f["t"].g + f["x"].g)
    if quantity == "dbar_dt":
        # good second derivative: dbar applied to d_t u
        return np.abs(rt * f["t"].gt + f["t"].gr)
    if quantity == "ddtt_ts2":
        # the bad second derivative carries its own (s/t)^2 normalization
        return (slc.s / slc.t) ** 2 * np.abs(f["tt"].g)
    raise ValueError(f"unknown quantity {quantity!r}; supported: {QUANTITIES}")


def sup_decay(slice_data: SliceData, component: int, quantity: str,
              weight: str) -> float:
    vals = quantity_values(slice_data, component, quantity)
    if not len(vals):
        return 0.0
    return float(np.max(_weight_array(slice_data.slice, weight) * vals))


@dataclass
class ExponentFit:
    slope: float
    intercept: float
    residual: float
    n_points: int


def fit_exponent(s_values, values) -> ExponentFit:
    """Least-squares slope of log(value) against log(s)."""
    s = np.asarray(s_values, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(s) < 5:
        raise ValueError("exponent fit needs at least 5 points")
    if np.any(v <= 0.0):
        raise ValueError("exponent fit needs positive values")
    x = np.log(s)
    y = np.log(v)
    a = np.vstack([x, np.ones_like(x)]).T
    coef, res, _, _ = np.linalg.lstsq(a, y, rcond=None)
    resid = float(np.sqrt(res[0])) if len(res) else float(
        np.linalg.norm(y - a @ coef)
    )
    return ExponentFit(slope=float(coef[0]), intercept=float(coef[1]),
                       residual=resid, n_points=len(s))


FIT_WINDOW_LO = 5.0
FIT_WINDOW_FRACTION = 0.8


def default_fit_window(s_values):
    """[5, 0.8 s_max]: skips the initial transient and the horizon end."""
    s = np.asarray(s_values, dtype=float)
    hi = FIT_WINDOW_FRACTION * float(s.max())
    mask = (s >= FIT_WINDOW_LO) & (s <= hi)
    if mask.sum() < 5:
        mask = np.ones(len(s), dtype=bool)
    return mask
