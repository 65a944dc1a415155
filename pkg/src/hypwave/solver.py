"""Radial evolution of coupled wave/Klein-Gordon systems.

Systems follow the quadratic template

    box w_i + G_i^{j ab} d_ab w_j + D_i^2 w_i = F_i(w, dw),
    G_i^{j ab} = A_i^{j ab g k} d_g w_k + B_i^{j ab k} w_k,
    F_i = P_i^{ab j k} da w_j db w_k + Q_i^{a j k} w_k da w_j + R_i^{j k} w_j w_k,

with constant rational coefficients carried as full spacetime-indexed
arrays (that is what the structure conditions constrain).  The radial
reduction keeps the rotation-invariant part: time-time blocks and
isotropic spatial blocks; anything direction-dependent is rejected, since
it cannot act on radial data.

Data is posed on the plane t = B + 1 with support in r <= B; evolution is
standard-time method of lines (4th-order stencils, classical four-stage
time stepper, optional fourth-difference dissipation), with hyperboloidal
slices interpolated on the fly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .hypergeom import SliceExtractor
from .nullforms import CubicForm, QuadraticForm, is_null


class RadialRestrictionError(Exception):
    """A coefficient block has no rotation-invariant radial action."""


class CFLError(Exception):
    pass


class BoundaryContaminationError(Exception):
    pass


# ---------------------------------------------------------------------------
# system description
# ---------------------------------------------------------------------------


def _zeros(shape):
    if not shape:
        return Fraction(0)
    return tuple(_zeros(shape[1:]) for _ in range(shape[0]))


def _tuplify(arr):
    if isinstance(arr, (list, tuple)):
        return tuple(_tuplify(a) for a in arr)
    return Fraction(arr)


@dataclass
class SystemSpec:
    """Coupled system instance; wave components (D_i = 0) come first."""

    n_components: int
    masses: tuple
    bound: Fraction = Fraction(1)
    p: dict = field(default_factory=dict)  # (i,j,k) -> 4x4
    q: dict = field(default_factory=dict)  # (i,j,k) -> 4-vector
    r: dict = field(default_factory=dict)  # (i,j,k) -> scalar
    a: dict = field(default_factory=dict)  # (i,j,k) -> 4x4x4
    b: dict = field(default_factory=dict)  # (i,j,k) -> 4x4

    def __post_init__(self):
        self.masses = tuple(float(m) for m in self.masses)
        if len(self.masses) != self.n_components:
            raise ValueError("one mass per component")
        if any(m < 0 for m in self.masses):
            raise ValueError("masses must be nonnegative")
        j0 = 0
        while j0 < self.n_components and self.masses[j0] == 0.0:
            j0 += 1
        if any(m == 0.0 for m in self.masses[j0:]):
            raise ValueError("wave components (D=0) must come first")
        self.j0 = j0
        self.bound = Fraction(self.bound)

    # -- builders -------------------------------------------------------
    def add_p(self, i, j, k, tt, xx=0):
        m = [[Fraction(0)] * 4 for _ in range(4)]
        m[0][0] = Fraction(tt)
        for a in (1, 2, 3):
            m[a][a] = Fraction(xx)
        self.p[(i, j, k)] = _tuplify(m)
        return self

    def add_p_full(self, i, j, k, matrix):
        self.p[(i, j, k)] = _tuplify(matrix)
        return self

    def add_q(self, i, j, k, t_coef):
        self.q[(i, j, k)] = (Fraction(t_coef), Fraction(0), Fraction(0), Fraction(0))
        return self

    def add_q_full(self, i, j, k, vec):
        self.q[(i, j, k)] = tuple(Fraction(v) for v in vec)
        return self

    def add_r(self, i, j, k, c):
        self.r[(i, j, k)] = Fraction(c)
        return self

    def add_a(self, i, j, k, tt, xx=0):
        m = [[[Fraction(0)] * 4 for _ in range(4)] for _ in range(4)]
        m[0][0][0] = Fraction(tt)
        for a in (1, 2, 3):
            m[a][a][0] = Fraction(xx)
        self.a[(i, j, k)] = _tuplify(m)
        return self

    def add_b(self, i, j, k, tt, xx=0):
        m = [[Fraction(0)] * 4 for _ in range(4)]
        m[0][0] = Fraction(tt)
        for a in (1, 2, 3):
            m[a][a] = Fraction(xx)
        self.b[(i, j, k)] = _tuplify(m)
        return self

    def is_wave(self, i) -> bool:
        return i < self.j0

    def is_semilinear(self) -> bool:
        return not self.a and not self.b

    # -- radial restriction ----------------------------------------------
    @staticmethod
    def _restrict_quad(m, what):
        tt = m[0][0]
        xx = m[1][1]
        for al in range(4):
            for be in range(4):
                v = m[al][be]
                if al == 0 and be == 0:
                    continue
                if al == be:
                    if v != xx:
                        raise RadialRestrictionError(
                            f"{what}: anisotropic spatial block acts on no radial data"
                        )
                elif v != 0:
                    raise RadialRestrictionError(
                        f"{what}: mixed index ({al},{be}) has no radial action"
                    )
        return float(tt), float(xx)

    def radial_p(self):
        return {ijk: self._restrict_quad(m, f"P{ijk}") for ijk, m in self.p.items()}

    def radial_q(self):
        out = {}
        for ijk, vec in self.q.items():
            if any(v != 0 for v in vec[1:]):
                raise RadialRestrictionError(
                    f"Q{ijk}: spatial undifferentiated coupling has no radial action"
                )
            out[ijk] = float(vec[0])
        return out

    def radial_r(self):
        return {ijk: float(c) for ijk, c in self.r.items()}

    def radial_a(self):
        out = {}
        for ijk, m in self.a.items():
            for ga in (1, 2, 3):
                for al in range(4):
                    for be in range(4):
                        if m[al][be][ga] != 0:
                            raise RadialRestrictionError(
                                f"A{ijk}: spatial gradient factor has no radial action"
                            )
            quad = tuple(tuple(m[al][be][0] for be in range(4)) for al in range(4))
            out[ijk] = self._restrict_quad(quad, f"A{ijk}")
        return out

    def radial_b(self):
        return {ijk: self._restrict_quad(m, f"B{ijk}") for ijk, m in self.b.items()}


# ---------------------------------------------------------------------------
# structure validation
# ---------------------------------------------------------------------------


@dataclass
class StructureReport:
    compliant: bool
    violations: list
    checked: list

    def clauses(self):
        return sorted({c for c, _ in self.violations})


def validate_system(spec: SystemSpec) -> StructureReport:
    """Checks the hyperbolicity symmetry, the wave-sector null conditions
    and the no-undifferentiated-wave-factor vanishing conditions."""
    violations = []
    checked = []

    def wave(i):
        return spec.is_wave(i)

    # symmetry of the principal part: G_i^{j ab} = G_j^{i ab} = G_i^{j ba}
    checked.append("symmetry")
    for store, name in ((spec.a, "A"), (spec.b, "B")):
        keys = set(store)
        for (i, j, k) in keys:
            mine = store[(i, j, k)]
            other = store.get((j, i, k), _zeros((4, 4, 4) if name == "A" else (4, 4)))
            if mine != other:
                violations.append(("symmetry", f"{name}[{i},{j},{k}] != {name}[{j},{i},{k}]"))
            if name == "A":
                sym = all(
                    mine[al][be][ga] == mine[be][al][ga]
                    for al in range(4) for be in range(4) for ga in range(4)
                )
            else:
                sym = all(mine[al][be] == mine[be][al] for al in range(4) for be in range(4))
            if not sym:
                violations.append(("symmetry", f"{name}[{i},{j},{k}] not symmetric in (a,b)"))

    # null conditions on wave-sector blocks of the wave equations
    checked.append("null-conditions")
    for (i, j, k), m in spec.a.items():
        if wave(i) and wave(j) and wave(k):
            if not is_null(CubicForm(m)):
                violations.append(("null-A", f"A[{i},{j},{k}] not null on the cone"))
    for (i, j, k), m in spec.b.items():
        if wave(i) and wave(j) and wave(k):
            if not is_null(QuadraticForm(m)):
                violations.append(("null-B", f"B[{i},{j},{k}] not null on the cone"))
    for (i, j, k), m in spec.p.items():
        if wave(i) and wave(j) and wave(k):
            if not is_null(QuadraticForm(m)):
                violations.append(("null-P", f"P[{i},{j},{k}] not null on the cone"))

    # vanishing conditions: no undifferentiated wave factors outside the
    # null-conditioned quasilinear wave sector
    checked.append("vanishing")
    for (i, j, k), m in spec.b.items():
        if not wave(j) and wave(k) and any(
            m[al][be] != 0 for al in range(4) for be in range(4)
        ):
            violations.append(
                ("vanishing-B", f"B[{i},{j},{k}]: bare wave factor on a mass-carrier block")
            )
    for (i, j, k), vec in spec.q.items():
        if wave(k) and any(v != 0 for v in vec):
            violations.append(("vanishing-Q", f"Q[{i},{j},{k}]: bare wave factor"))
    for (i, j, k), c in spec.r.items():
        if (wave(j) or wave(k)) and c != 0:
            violations.append(("vanishing-R", f"R[{i},{j},{k}]: bare wave factor"))

    # magnitude bound
    checked.append("magnitude")

    def flat(node):
        if isinstance(node, Fraction):
            yield node
        else:
            for sub in node:
                yield from flat(sub)

    for store, name in ((spec.p, "P"), (spec.q, "Q"), (spec.r, "R"), (spec.a, "A"),
                        (spec.b, "B")):
        for ijk, m in store.items():
            if any(abs(c) > spec.bound for c in flat(m)):
                violations.append(("magnitude", f"{name}[{ijk}] exceeds the bound K"))

    return StructureReport(compliant=not violations, violations=violations,
                           checked=checked)


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------

PROFILES = ("poly4", "expbump", "shell4", "zero")


def profile_values(name: str, r: np.ndarray, B: float) -> np.ndarray:
    x = r / B
    inside = x < 1.0
    out = np.zeros_like(r)
    if name == "poly4":
        out[inside] = (1.0 - x[inside] ** 2) ** 4
    elif name == "expbump":
        y = x[inside] ** 2
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - y))
    elif name == "shell4":
        y = x[inside] ** 2
        # hollow bump x^2 (1-x^2)^4, peak normalized to 1 at x^2 = 1/5
        out[inside] = y * (1.0 - y) ** 4 / (0.2 * 0.8**4)
    elif name == "zero":
        pass
    else:
        raise ValueError(f"unknown profile {name!r}; choose from {PROFILES}")
    return out


@dataclass
class InitialData:
    component_profiles: list  # (value_name, velocity_name) per component
    epsilon: float
    B: float

    def arrays(self, r: np.ndarray):
        n = len(self.component_profiles)
        w0 = np.zeros((n, len(r)))
        w1 = np.zeros((n, len(r)))
        for i, (pv, pt) in enumerate(self.component_profiles):
            w0[i] = self.epsilon * profile_values(pv, r, self.B)
            w1[i] = self.epsilon * profile_values(pt, r, self.B)
        return w0, w1

    def scaled(self, factor: float) -> "InitialData":
        return InitialData(self.component_profiles, self.epsilon * factor, self.B)


def make_initial(profile: str, epsilon: float, B: float, n_components: int = 1,
                 velocity_profile: str = "zero") -> InitialData:
    if epsilon < 0:
        raise ValueError("amplitude must be nonnegative")
    if profile not in PROFILES or velocity_profile not in PROFILES:
        raise ValueError(f"unknown profile; choose from {PROFILES}")
    return InitialData([(profile, velocity_profile)] * n_components, epsilon, B)


# ---------------------------------------------------------------------------
# evolution
# ---------------------------------------------------------------------------


@dataclass
class GridParams:
    h_r: float
    r_domain: float
    cfl: float = 0.5


@dataclass
class History:
    h_r: float
    h_t: float
    t0: float
    n_components: int
    masses2: object = None
    source_jet: object = None
    blowup: bool = False
    blowup_time: float = None
    support_ok: bool = True
    sup_times: np.ndarray = None
    sup_series: np.ndarray = None
    _levels: list = field(default_factory=list)
    _accel: object = None
    _wtt_cache: dict = field(default_factory=dict)

    def times(self):
        return np.array([lv[0] for lv in self._levels])

    def n_levels(self):
        return len(self._levels)

    def level(self, k: int):
        t, w, wt = self._levels[k]
        if k not in self._wtt_cache:
            self._wtt_cache[k] = self._accel(w, wt, t)
        return (t, w, wt, self._wtt_cache[k])

    def final(self):
        return self._levels[-1]


def _coef_arrays(spec: SystemSpec):
    n = spec.n_components
    ptt = np.zeros((n, n, n))
    pxx = np.zeros((n, n, n))
    qt = np.zeros((n, n, n))
    rc = np.zeros((n, n, n))
    for (i, j, k), (tt, xx) in spec.radial_p().items():
        ptt[i, j, k] += tt
        pxx[i, j, k] += xx
    for (i, j, k), t_coef in spec.radial_q().items():
        qt[i, j, k] += t_coef
    for (i, j, k), c in spec.radial_r().items():
        rc[i, j, k] += c
    return ptt, pxx, qt, rc


def _quasi_arrays(spec: SystemSpec):
    n = spec.n_components
    att = np.zeros((n, n, n))
    axx = np.zeros((n, n, n))
    btt = np.zeros((n, n, n))
    bxx = np.zeros((n, n, n))
    for (i, j, k), (tt, xx) in spec.radial_a().items():
        att[i, j, k] += tt
        axx[i, j, k] += xx
    for (i, j, k), (tt, xx) in spec.radial_b().items():
        btt[i, j, k] += tt
        bxx[i, j, k] += xx
    return att, axx, btt, bxx


SUPPORT_HALO = 4  # nodes past r = t - 1 allowed to be nonzero
SUPPORT_TOL = 1.0e-10


def source_jet(spec: SystemSpec):
    """Callable giving the semilinear sources and their time derivatives on
    arrays of field values; None when the system has principal-part terms
    (slice extraction then falls back to window differencing)."""
    if not spec.is_semilinear():
        return None
    rp = list(spec.radial_p().items())
    rq = list(spec.radial_q().items())
    rr = list(spec.radial_r().items())
    if not (rp or rq or rr):
        return None

    def jet(u, ut, utt, ur, utr):
        f = [np.zeros_like(u[0]) for _ in u]
        ft = [np.zeros_like(u[0]) for _ in u]
        for (i, j, k), (ptt, pxx) in rp:
            f[i] += ptt * ut[j] * ut[k] + pxx * ur[j] * ur[k]
            ft[i] += ptt * (utt[j] * ut[k] + ut[j] * utt[k]) + pxx * (
                utr[j] * ur[k] + ur[j] * utr[k])
        for (i, j, k), qt_ in rq:
            f[i] += qt_ * u[k] * ut[j]
            ft[i] += qt_ * (ut[k] * ut[j] + u[k] * utt[j])
        for (i, j, k), rc_ in rr:
            f[i] += rc_ * u[j] * u[k]
            ft[i] += rc_ * (ut[j] * u[k] + u[j] * ut[k])
        return f, ft

    return jet


def evolve(spec: SystemSpec, data: InitialData, grid: GridParams, t_end: float, *,
           sigma_ko: float = 0.02, store_every: int = 0,
           extractor: SliceExtractor = None, blowup_ceiling: float = 1.0e3,
           support_check_every: int = 50) -> History:
    """March the system from t = B + 1 to t_end.  Slices are interpolated
    through `extractor` while the run streams; blow-up (amplitude past the
    ceiling, or non-finite values) stops the run and flags the history."""
    if grid.cfl > 0.5 + 1e-12:
        raise CFLError(f"time step ratio {grid.cfl} exceeds 0.5")
    t0 = data.B + 1.0
    h = grid.h_r
    ht = grid.cfl * h
    if t_end <= t0 + ht:
        raise ValueError(f"t_end={t_end} must exceed the data plane t0={t0}")
    margin = 0.5 + 24.0 * h
    if grid.r_domain < t_end - 1.0 + margin:
        raise BoundaryContaminationError(
            f"domain radius {grid.r_domain} cannot contain the support up to "
            f"t = {t_end} (needs >= {t_end - 1.0 + margin:g})"
        )
    if extractor is not None and extractor.required_t_end() > t_end - 2 * ht:
        raise ValueError("t_end too small for the requested slices")

    nr = int(round(grid.r_domain / h)) + 1
    r = np.arange(nr) * h
    inv_r = np.zeros(nr)
    inv_r[1:] = 1.0 / r[1:]
    nc = spec.n_components
    w, wt = data.arrays(r)
    w = np.ascontiguousarray(w)
    wt = np.ascontiguousarray(wt)

    ptt, pxx, qt, rc = _coef_arrays(spec)
    has_f = bool(ptt.any() or pxx.any() or qt.any() or rc.any())
    masses2 = np.array([m * m for m in spec.masses])
    quasilinear = not spec.is_semilinear()
    if quasilinear:
        att, axx, btt, bxx = _quasi_arrays(spec)
    sig = sigma_ko / (64.0 * ht)

    ws = np.zeros((11, nc, nr))
    n_steps = int(math.ceil((t_end - t0) / ht - 1e-9))

    def active_n(t):
        return min(nr - 3, int((t - t0 + data.B + margin) / h) + 1)

    def damp_edge(t):
        return max(0, int((t - 1.0) / h) - 12)

    def accel(wv, wtv, t):
        dw = np.empty_like(wv)
        da = np.empty_like(wv)
        _kernels.rhs_semilinear(wv, wtv, h, nr - 3, inv_r, masses2, ptt, pxx, qt, rc,
                                has_f, sig, damp_edge(t), dw, da)
        if quasilinear:
            lap = np.empty_like(wv)
            _kernels.lap_all(wv, h, nr - 3, inv_r, lap)
            _apply_quasilinear(da, lap, wv, wtv, att, axx, btt, bxx)
        return da

    hist = History(h_r=h, h_t=ht, t0=t0, n_components=nc)
    hist._accel = lambda wv, wtv, tv: accel(wv, wtv, tv)
    extract_buf = 67  # level buffer length; chunks overlap by 3 levels
    # slice extraction rebuilds the third time derivative from the equations
    jet = source_jet(spec)
    hist.masses2 = masses2 if spec.is_semilinear() else None
    hist.source_jet = jet
    if extractor is not None:
        extractor.attach_system(hist.masses2, jet)
    sup_t, sup_v = [], []
    if extractor is not None:
        buf = np.zeros((extract_buf, 3, nc, nr))
        buf_t = np.zeros(extract_buf)
        buf_p = 0
    first_chunk_done = False

    def flush_window(at_end=False):
        nonlocal first_chunk_done, buf_p
        if buf_p >= 4:
            extractor.advance_buffer(buf_t[:buf_p], buf[:buf_p],
                                     at_start=not first_chunk_done, at_end=at_end)
            first_chunk_done = True
        if not at_end and buf_p == extract_buf:
            buf[0:3] = buf[buf_p - 3:buf_p]
            buf_t[0:3] = buf_t[buf_p - 3:buf_p]
            buf_p = 3

    def store(t):
        hist._levels.append((t, w.copy(), wt.copy()))

    store(t0)
    t = t0
    for k in range(n_steps):
        n = active_n(t + ht)
        if extractor is not None:
            m = min(nr, n + 4)
            buf_t[buf_p] = t
            buf[buf_p, 0, :, :m] = w[:, :m]
            buf[buf_p, 1, :, :m] = wt[:, :m]
        nd = damp_edge(t)
        if quasilinear:
            _rk4_quasilinear_step(w, wt, ht, h, n, inv_r, masses2, ptt, pxx, qt, rc,
                                  has_f, sig, nd, att, axx, btt, bxx, ws)
        else:
            _kernels.rk4_step_semilinear(w, wt, ht, h, n, inv_r, masses2, ptt, pxx,
                                         qt, rc, has_f, sig, nd, ws)
        if extractor is not None:
            # ws[1] holds the stage-one rhs, the acceleration at the pre-step state
            buf[buf_p, 2, :, :m] = ws[1][:, :m]
            buf_p += 1
            if buf_p == extract_buf:
                flush_window()
        t = t0 + (k + 1) * ht
        m = _kernels.max_abs(w, n)
        sup_t.append(t)
        sup_v.append(m)
        if not np.isfinite(m) or m > blowup_ceiling:
            hist.blowup = True
            hist.blowup_time = t
            break
        if store_every and (k + 1) % store_every == 0:
            store(t)
        if (k + 1) % support_check_every == 0:
            edge = int((t - 1.0 + SUPPORT_HALO * h) / h) + 1
            if edge < nr and np.max(np.abs(w[:, edge:])) > SUPPORT_TOL:
                hist.support_ok = False
            if np.max(np.abs(w[:, nr - 6:])) > SUPPORT_TOL:
                raise BoundaryContaminationError("support reached the outer boundary")

    if not hist.blowup:
        if extractor is not None:
            # flush the trailing levels including nodes at the final times
            acc = accel(w, wt, t)
            buf_t[buf_p] = t
            buf[buf_p, 0] = w
            buf[buf_p, 1] = wt
            buf[buf_p, 2] = acc
            buf_p += 1
            flush_window(at_end=True)
        if not hist._levels or hist._levels[-1][0] < t - 1e-12:
            store(t)
    else:
        store(t)
    hist.sup_times = np.array(sup_t)
    hist.sup_series = np.array(sup_v)
    if extractor is not None and not hist.blowup and extractor.pending():
        raise RuntimeError("slice extraction incomplete at the end of the run")
    return hist


def _apply_quasilinear(da, lap, w, wt, att, axx, btt, bxx):
    """Solve (I + G^tt) acc = base - G^xx Lap w pointwise (vectorized)."""
    nc, nr = w.shape
    gtt = np.einsum("ijk,kn->ijn", att, wt) + np.einsum("ijk,kn->ijn", btt, w)
    gxx = np.einsum("ijk,kn->ijn", axx, wt) + np.einsum("ijk,kn->ijn", bxx, w)
    b = da - np.einsum("ijn,jn->in", gxx, lap)
    m = np.broadcast_to(np.eye(nc)[:, :, None], (nc, nc, nr)) + gtt
    da[:] = np.linalg.solve(m.transpose(2, 0, 1), b.T[:, :, None])[:, :, 0].T


def _rk4_quasilinear_step(w, wt, ht, h, n, inv_r, masses2, ptt, pxx, qt, rc,
                          has_f, sig, n_damp, att, axx, btt, bxx, ws):
    k1w, k1a, k2w, k2a, k3w, k3a, _k4w, _k4a, tw, twt, _wr = ws
    lap = np.empty_like(w)

    def rhs(wv, wtv, dw, da):
        _kernels.rhs_semilinear(wv, wtv, h, n, inv_r, masses2, ptt, pxx, qt, rc,
                                has_f, sig, n_damp, dw, da)
        _kernels.lap_all(wv, h, n, inv_r, lap)
        _apply_quasilinear(da[:, :n], lap[:, :n], wv[:, :n], wtv[:, :n],
                           att, axx, btt, bxx)

    rhs(w, wt, k1w, k1a)
    np.multiply(k1w, 0.5 * ht, out=tw); tw += w
    np.multiply(k1a, 0.5 * ht, out=twt); twt += wt
    rhs(tw, twt, k2w, k2a)
    np.multiply(k2w, 0.5 * ht, out=tw); tw += w
    np.multiply(k2a, 0.5 * ht, out=twt); twt += wt
    rhs(tw, twt, k3w, k3a)
    np.multiply(k3w, ht, out=tw); tw += w
    np.multiply(k3a, ht, out=twt); twt += wt
    k2w += k3w
    k2a += k3a
    rhs(tw, twt, k3w, k3a)
    w += (ht / 6.0) * (k1w + 2.0 * k2w + k3w)
    wt += (ht / 6.0) * (k1a + 2.0 * k2a + k3a)


# ---------------------------------------------------------------------------
# diagnostics on plane slices
# ---------------------------------------------------------------------------


def radial_derivative(u: np.ndarray, h: float) -> np.ndarray:
    """4th-order derivative of an even radial profile."""
    n = len(u)
    out = np.zeros(n)
    ext = np.concatenate([u[2:0:-1], u, [0.0, 0.0]])
    out = (ext[0:n] - 8.0 * ext[1:n + 1] + 8.0 * ext[3:n + 3] - ext[4:n + 4]) / (12.0 * h)
    out[0] = 0.0
    return out


def plane_energy(w: np.ndarray, wt: np.ndarray, D: float, h: float) -> float:
    """Fixed-time energy  int (wt^2 + w_r^2 + D^2 w^2) 4 pi r^2 dr."""
    r = np.arange(len(w)) * h
    wr = radial_derivative(w, h)
    dens = wt * wt + wr * wr + (D * D) * w * w
    quad = 4.0 * np.pi * r * r * h
    if len(quad) > 1:
        quad[0] *= 0.5
        quad[-1] *= 0.5
    return float(np.dot(quad, dens))


def plane_energy_series(history: History, component: int, D: float):
    ts, es = [], []
    for t, w, wt in history._levels:
        ts.append(t)
        es.append(plane_energy(w[component], wt[component], D, history.h_r))
    return np.array(ts), np.array(es)


# ---------------------------------------------------------------------------
# ready-made systems
# ---------------------------------------------------------------------------


def system_linear_wave() -> SystemSpec:
    return SystemSpec(n_components=1, masses=(0.0,))


def system_linear_kg(mass: float = 1.0) -> SystemSpec:
    return SystemSpec(n_components=1, masses=(mass,))


def system_null_prototype() -> SystemSpec:
    """Wave u coupled to Klein-Gordon v: the wave-wave interaction is the
    metric null form, the mixed and KG-KG quadratics are generic."""
    spec = SystemSpec(n_components=2, masses=(0.0, 1.0))
    spec.add_p(0, 0, 0, tt=1, xx=-1)                  # null form N(du, du)
    spec.add_p(0, 0, 1, tt=Fraction(1, 2), xx=Fraction(1, 3))
    spec.add_p(0, 1, 1, tt=Fraction(1, 3), xx=Fraction(-1, 5))
    spec.add_p(1, 0, 0, tt=Fraction(2, 5), xx=Fraction(1, 2))
    spec.add_p(1, 0, 1, tt=Fraction(-1, 4), xx=Fraction(1, 3))
    spec.add_p(1, 1, 1, tt=Fraction(1, 5), xx=Fraction(1, 6))
    return spec


def system_nonull_probe() -> SystemSpec:
    """box u = (d_t u)^2: the classic non-null quadratic self-interaction."""
    spec = SystemSpec(n_components=1, masses=(0.0,))
    spec.add_p(0, 0, 0, tt=1, xx=0)
    return spec


def system_null_twin() -> SystemSpec:
    """box u = N(du, du) on the same footing as the non-null probe."""
    spec = SystemSpec(n_components=1, masses=(0.0,))
    spec.add_p(0, 0, 0, tt=1, xx=-1)
    return spec


def system_quasilinear_demo(kappa=Fraction(1, 10)) -> SystemSpec:
    """Single wave with the null-conditioned field-times-second-derivative
    coupling  u (d_tt - Lap) u."""
    spec = SystemSpec(n_components=1, masses=(0.0,))
    spec.add_b(0, 0, 0, tt=kappa, xx=-kappa)
    return spec
