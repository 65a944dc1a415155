"""Scenario orchestration and report generation.

A scenario bundles a system, initial data, grid and analysis plan; running
it validates the structure conditions, evolves, extracts slices and writes
the CSV reports.  Re-running a scenario reproduces every byte: floats are
printed with 17 significant digits, orderings are fixed and all randomness
is seeded.
"""

from __future__ import annotations

import argparse
import configparser
import struct
import sys
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import analyzer, hypergeom, nullforms, opalgebra, solver

FROZEN_NULL_BOUND = {0: 1.0 + 1e-9, 1: 2.0 + 1e-9}  # pre-build exhaustive scan
DIVERGENCE_THRESHOLD = 1.0e4


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------


@dataclass
class Scenario:
    name: str
    system: object = None  # SystemSpec or None for non-evolution suites
    kind: str = "evolve"  # evolve | algebra | nullscan | sobolev | convergence | blowup-pair
    epsilon: float = 0.1
    B: float = 2.0
    profile: str = "expbump"
    velocity_profile: str = "zero"
    h_r: float = 0.02
    cfl: float = 0.4
    r_domain: float = None  # None: derived from t_end
    t_end: float = None  # None: derived from s_values
    sigma_ko: float = 0.02
    blowup_ceiling: float = 1.0e3
    s_values: tuple = ()
    max_order: int = 2
    checks: tuple = ()
    seed: int = 0
    checkpoint: str = None
    store_every: int = 0
    expects_blowup: bool = False

    def resolved_t_end(self) -> float:
        if self.t_end is not None:
            return self.t_end
        if not self.s_values:
            raise ValueError("scenario needs t_end or s_values")
        s_max = max(self.s_values)
        if self.t_end is None and s_max > np.sqrt(2e9):
            raise ValueError("slice range out of reach")
        return hypergeom.t_max(s_max) + 1.0

    def resolved_domain(self) -> float:
        if self.r_domain is not None:
            return self.r_domain
        return self.resolved_t_end() + 0.5

    def validate(self):
        t_end = self.resolved_t_end()
        for s in self.s_values:
            if hypergeom.t_max(s) > t_end:
                raise ValueError(
                    f"slice s={s} needs evolution through t={hypergeom.t_max(s):g}, "
                    f"beyond t_end={t_end:g} (s_max is sqrt(2 t_end - 1))"
                )


def _prototype_checks():
    return ("structure_compliant", "no_blowup", "low_order_wave_variation",
            "top_order_growth_exponent", "energy_inequality")


def presets() -> dict:
    return {
        "verify-algebra": Scenario(name="verify-algebra", kind="algebra",
                                   checks=("algebra_all_pass", "closure_deviation_flagged",
                                           "frame_inverse", "wave_frame_certified")),
        "nullscan-suite": Scenario(name="nullscan-suite", kind="nullscan",
                                   checks=("classifier_agreement", "null_bound",
                                           "nonnull_divergence")),
        "linear-wave": Scenario(
            name="linear-wave", system=solver.system_linear_wave(), epsilon=0.3,
            profile="expbump", h_r=1 / 200, cfl=0.35, sigma_ko=0.0,
            s_values=tuple(range(3, 21)),
            checks=("energy_constancy", "energy_inequality", "support_ok")),
        "linear-kg": Scenario(
            name="linear-kg", system=solver.system_linear_kg(1.0), epsilon=0.3,
            B=1.5, profile="poly4", h_r=1 / 32, cfl=0.3, sigma_ko=0.0,
            s_values=tuple(np.arange(5.0, 40.0 + 0.25, 0.5)),
            checks=("kg_decay_slope",)),
        "null-prototype": Scenario(
            name="null-prototype", system=solver.system_null_prototype(),
            epsilon=0.01, profile="expbump", velocity_profile="expbump",
            h_r=1 / 24, cfl=0.4, sigma_ko=0.02,
            s_values=tuple(range(3, 51)),
            checks=_prototype_checks()),
        "nonull-blowup": Scenario(
            name="nonull-blowup", system=solver.system_nonull_probe(),
            kind="blowup-pair", epsilon=0.5, B=5.4, profile="zero",
            velocity_profile="expbump", h_r=1 / 40, cfl=0.4, sigma_ko=0.02,
            t_end=25.0, r_domain=26.0, expects_blowup=True,
            checks=("expects_blowup", "null_twin_bounded")),
        "sobolev-suite": Scenario(name="sobolev-suite", kind="sobolev",
                                  checks=("sobolev_bounded", "sobolev_stability",
                                          "hardy_stability")),
        "convergence-suite": Scenario(
            name="convergence-suite", kind="convergence",
            checks=("wave_self_convergence", "kg_self_convergence",
                    "closed_form_order", "kg_plane_energy_drift")),
    }


def list_presets():
    return sorted(presets())


# ---------------------------------------------------------------------------
# scenario config files (INI)
# ---------------------------------------------------------------------------


def _parse_s_values(text: str):
    text = text.strip()
    if ":" in text:
        lo, hi, step = (float(x) for x in text.split(":"))
        vals = []
        v = lo
        while v <= hi + 1e-12:
            vals.append(round(v, 10))
            v += step
        return tuple(vals)
    return tuple(float(x) for x in text.split())


def _parse_system(sec) -> solver.SystemSpec:
    n = int(sec["components"])
    masses = tuple(float(x) for x in sec["masses"].split())
    spec = solver.SystemSpec(n_components=n, masses=masses,
                             bound=Fraction(sec.get("bound", "1")))
    for key, val in sec.items():
        parts = key.upper().split(".")
        if parts[0] not in ("P", "Q", "R", "A", "B") or len(parts) != 4:
            continue
        kind = parts[0]
        i, j, k = (int(p) - 1 for p in parts[1:])
        toks = [Fraction(t) for t in val.split()]
        if kind == "P":
            spec.add_p(i, j, k, *toks)
        elif kind == "Q":
            spec.add_q(i, j, k, toks[0])
        elif kind == "R":
            spec.add_r(i, j, k, toks[0])
        elif kind == "A":
            spec.add_a(i, j, k, *toks)
        elif kind == "B":
            spec.add_b(i, j, k, *toks)
    return spec


def load_scenario(path) -> Scenario:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.optionxform = str  # preserve case in coefficient keys
    try:
        with open(path) as fh:
            cp.read_file(fh, source=str(path))
    except (OSError, configparser.Error) as exc:
        raise ValueError(f"cannot parse scenario {path}: {exc}") from exc

    base = None
    name = Path(path).stem
    sc_sec = cp["scenario"] if cp.has_section("scenario") else {}
    if "preset" in sc_sec:
        pname = sc_sec["preset"]
        if pname not in presets():
            raise ValueError(f"unknown preset {pname!r} referenced by {path}")
        base = presets()[pname]
    sc = base if base is not None else Scenario(name=name)
    sc = replace(sc, name=sc_sec.get("name", name))

    if cp.has_section("system"):
        sc = replace(sc, system=_parse_system(cp["system"]))
    if cp.has_section("data"):
        d = cp["data"]
        sc = replace(
            sc,
            epsilon=float(d.get("epsilon", sc.epsilon)),
            B=float(d.get("B", sc.B)),
            profile=d.get("profile", sc.profile),
            velocity_profile=d.get("velocity_profile", sc.velocity_profile),
        )
    if cp.has_section("grid"):
        g = cp["grid"]
        sc = replace(
            sc,
            h_r=float(g.get("h_r", sc.h_r)),
            cfl=float(g.get("cfl", sc.cfl)),
            r_domain=float(g["r_domain"]) if "r_domain" in g else sc.r_domain,
            t_end=float(g["t_end"]) if "t_end" in g else sc.t_end,
        )
    if cp.has_section("evolution"):
        e = cp["evolution"]
        sc = replace(
            sc,
            sigma_ko=float(e.get("sigma_ko", sc.sigma_ko)),
            blowup_ceiling=float(e.get("blowup_ceiling", sc.blowup_ceiling)),
            checkpoint=e.get("checkpoint", sc.checkpoint),
            store_every=int(e.get("store_every", sc.store_every)),
        )
    if cp.has_section("analysis"):
        a = cp["analysis"]
        if "s_values" in a:
            sc = replace(sc, s_values=_parse_s_values(a["s_values"]))
        if "max_order" in a:
            sc = replace(sc, max_order=int(a["max_order"]))
        if "checks" in a:
            sc = replace(sc, checks=tuple(a["checks"].split()))
    return sc


# ---------------------------------------------------------------------------
# history checkpoint (flat binary)
# ---------------------------------------------------------------------------

_MAGIC = 0x48595057  # "HYPW"


def write_checkpoint(path, history: solver.History):
    levels = history._levels
    nc = history.n_components
    nr = levels[0][1].shape[1]
    with open(path, "wb") as fh:
        fh.write(struct.pack("<qqqq", _MAGIC, nc, nr, len(levels)))
        fh.write(struct.pack("<ddd", history.h_r, history.h_t, history.t0))
        for t, w, wt in levels:
            fh.write(struct.pack("<d", t))
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(wt, dtype="<f8").tobytes())


def read_checkpoint(path):
    with open(path, "rb") as fh:
        magic, nc, nr, nlev = struct.unpack("<qqqq", fh.read(32))
        if magic != _MAGIC:
            raise ValueError("not a history checkpoint")
        h_r, h_t, t0 = struct.unpack("<ddd", fh.read(24))
        levels = []
        for _ in range(nlev):
            (t,) = struct.unpack("<d", fh.read(8))
            w = np.frombuffer(fh.read(8 * nc * nr), dtype="<f8").reshape(nc, nr).copy()
            wt = np.frombuffer(fh.read(8 * nc * nr), dtype="<f8").reshape(nc, nr).copy()
            levels.append((t, w, wt))
    hist = solver.History(h_r=h_r, h_t=h_t, t0=t0, n_components=nc)
    hist._levels = levels
    return hist


# ---------------------------------------------------------------------------
# pipeline pieces
# ---------------------------------------------------------------------------


@dataclass
class RunResult:
    checks: list = field(default_factory=list)  # (check_id, value, threshold, ok)
    files: list = field(default_factory=list)

    def add(self, check_id, value, threshold, ok):
        self.checks.append((check_id, float(value), float(threshold), bool(ok)))

    def ok(self) -> bool:
        return all(c[3] for c in self.checks)


def _emit_checks(out: Path, res: RunResult):
    write_csv(out / "checks.csv", ("check_id", "value", "threshold", "pass"),
              res.checks)
    res.files.append(out / "checks.csv")


def run_algebra(sc: Scenario, out: Path, res: RunResult):
    t0 = time.perf_counter()
    results = opalgebra.run_identity_corpus()
    rows = [(r.identity_id, r.status, r.residual_terms) for r in results]
    phi, psi = opalgebra.frame_matrices()
    frame_ok = phi.matmul(psi).is_identity() and psi.matmul(phi).is_identity()
    rows.append(("frame_inverse", "pass" if frame_ok else "fail", 0 if frame_ok else 1))
    dec = opalgebra.wave_frame_decomposition()
    from .conerat import ConeRational

    c00_ok = dec.table[(0, 0)] == ConeRational.from_string("s^2/t^2")
    bad_monomials = dec.certify_on_monomials(4)
    rows.append(("wave_frame_c00", "pass" if c00_ok else "fail", 0 if c00_ok else 1))
    rows.append(("wave_frame_monomials", "pass" if bad_monomials == 0 else "fail",
                 bad_monomials))
    write_csv(out / "algebra_report.csv", ("identity_id", "status", "residual_terms"),
              rows)

    table = opalgebra.commutator_table()
    trows = [(e.left, e.right, e.kind, e.detail,
              "closure-deviation" if e.kind == "rotation" else "")
             for e in table]
    write_csv(out / "commutator_table.csv",
              ("left", "right", "kind", "result", "flag"), trows)
    elapsed = time.perf_counter() - t0

    n_fail = sum(1 for r in results if r.status != "pass")
    res.add("algebra_all_pass", n_fail, 0, n_fail == 0)
    deviations = opalgebra.closure_deviation(table)
    res.add("closure_deviation_flagged", len(deviations), 6, len(deviations) == 6)
    res.add("frame_inverse", 0 if frame_ok else 1, 0, frame_ok)
    res.add("wave_frame_certified", bad_monomials, 0,
            bad_monomials == 0 and c00_ok)
    res.add("algebra_runtime_seconds", elapsed, 5.0, elapsed < 5.0)
    res.files += [out / "algebra_report.csv", out / "commutator_table.csv"]


def run_nullscan_suite(sc: Scenario, out: Path, res: RunResult):
    rng = np.random.default_rng(sc.seed)
    rows = []
    disagreements = 0
    worst = {0: 0.0, 1: 0.0}
    for i in range(100):
        f = nullforms.random_quadratic(rng, null=bool(i % 2))
        alg = nullforms.is_null(f)
        orc = nullforms.oracle_is_null(f)
        disagreements += alg != orc
        measured = ""
        if alg:
            scan = nullforms.null_bound_scan(f)
            if i < 100:
                worst[0] = max(worst[0], scan.measured[0])
                worst[1] = max(worst[1], scan.measured[1])
            measured = scan.measured[1]
        rows.append((f"quadratic_{i:03d}", "null" if alg else "nonnull",
                     "agree" if alg == orc else "DISAGREE", measured))
    for i in range(50):
        f = nullforms.random_cubic(rng, null=bool(i % 2))
        alg = nullforms.is_null(f)
        orc = nullforms.oracle_is_null(f)
        disagreements += alg != orc
        rows.append((f"cubic_{i:03d}", "null" if alg else "nonnull",
                     "agree" if alg == orc else "DISAGREE", ""))
    probe = nullforms.QuadraticForm(
        tuple(tuple(Fraction(1 if i == j == 0 else 0) for j in range(4))
              for i in range(4)))
    div = nullforms.divergence_scan(probe)
    rows.append(("nonnull_time_squared", "nonnull", "divergence", div))
    write_csv(out / "nullscan_report.csv",
              ("form_id", "classification", "oracle", "weighted_sup"), rows)
    res.add("classifier_agreement", disagreements, 0, disagreements == 0)
    res.add("null_bound", worst[1], FROZEN_NULL_BOUND[1],
            worst[0] <= FROZEN_NULL_BOUND[0] and worst[1] <= FROZEN_NULL_BOUND[1])
    res.add("nonnull_divergence", div, DIVERGENCE_THRESHOLD,
            div > DIVERGENCE_THRESHOLD)
    res.files.append(out / "nullscan_report.csv")


def run_nullscan_file(form_path, out: Path, res: RunResult):
    form = nullforms.form_from_text(Path(form_path).read_text())
    null = nullforms.is_null(form)
    orc = nullforms.oracle_is_null(form)
    rows = [("input", "null" if null else "nonnull",
             "agree" if null == orc else "DISAGREE",
             nullforms.null_bound_scan(form).measured[1] if null
             else nullforms.divergence_scan(form))]
    write_csv(out / "nullscan_report.csv",
              ("form_id", "classification", "oracle", "weighted_sup"), rows)
    res.add("classifier_agreement", int(null != orc), 0, null == orc)
    res.files.append(out / "nullscan_report.csv")


def _word_list(max_order):
    return [w for w in hypergeom.WORDS if hypergeom.word_order(w) <= max_order]


def run_evolution(sc: Scenario, out: Path, res: RunResult):
    spec = sc.system
    report = solver.validate_system(spec)
    if "structure_compliant" in sc.checks:
        res.add("structure_compliant", len(report.violations), 0, report.compliant)
    data = solver.InitialData([(sc.profile, sc.velocity_profile)] * spec.n_components,
                              sc.epsilon, sc.B)
    t_end = sc.resolved_t_end()
    grid = solver.GridParams(h_r=sc.h_r, r_domain=sc.resolved_domain(), cfl=sc.cfl)
    ext = None
    if sc.s_values:
        ext = hypergeom.SliceExtractor(sc.s_values, sc.h_r, spec.n_components,
                                       sc.max_order)
    hist = solver.evolve(spec, data, grid, t_end, sigma_ko=sc.sigma_ko,
                         extractor=ext, blowup_ceiling=sc.blowup_ceiling,
                         store_every=sc.store_every)
    if sc.checkpoint:
        write_checkpoint(out / sc.checkpoint, hist)
        res.files.append(out / sc.checkpoint)

    # timeseries of the sup norm
    trows = [(sc.name, t, v) for t, v in zip(hist.sup_times[::10], hist.sup_series[::10])]
    write_csv(out / "timeseries.csv", ("series", "t", "sup_abs"), trows)
    res.files.append(out / "timeseries.csv")

    if "no_blowup" in sc.checks:
        res.add("no_blowup", int(hist.blowup), 0, not hist.blowup)
    if "support_ok" in sc.checks:
        res.add("support_ok", int(not hist.support_ok), 0, hist.support_ok)
    if not sc.s_values or hist.blowup:
        return hist, None
    slices = [ext.results[s] for s in sc.s_values]

    words = _word_list(sc.max_order)
    erows = []
    energies = {}
    for sd in slices:
        for c in range(spec.n_components):
            for w in words:
                em = analyzer.energy_m(sd, c, w, spec.masses[c])
                if spec.is_semilinear():
                    eg = em
                else:
                    eg = analyzer.energy_g(sd, spec, c, w)[0]
                energies[(sd.slice.s, c, w)] = em
                erows.append((sd.slice.s, c, w if w else "1", em, eg))
    write_csv(out / "energies.csv",
              ("s", "component", "multi_index", "E_m", "E_G"), erows)
    res.files.append(out / "energies.csv")

    quantities = [("value", "t32"), ("grad", "st12"), ("dbar", "t32")]
    if sc.max_order >= 2:
        quantities += [("dbar_dt", "st32"), ("ddtt_ts2", "st12")]
    drows = []
    sups = {}
    for sd in slices:
        for c in range(spec.n_components):
            for q, wgt in quantities:
                v = analyzer.sup_decay(sd, c, q, wgt)
                sups[(sd.slice.s, c, q, wgt)] = v
                drows.append((sd.slice.s, f"c{c}.{q}.{wgt}", v))
    write_csv(out / "decay.csv", ("s", "quantity", "weighted_sup"), drows)
    res.files.append(out / "decay.csv")

    s_arr = np.array(sc.s_values, dtype=float)
    frows = []

    if "energy_constancy" in sc.checks:
        worst = 0.0
        for c in range(spec.n_components):
            for w in words:
                e = np.array([energies[(s, c, w)] for s in sc.s_values])
                if e.max() > 0:
                    worst = max(worst, (e.max() - e.min()) / e.max())
        res.add("energy_constancy", worst, 1e-4, worst <= 1e-4)

    if "low_order_wave_variation" in sc.checks:
        worst = 0.0
        for c in range(spec.j0):
            for w in words:
                if hypergeom.word_order(w) > 1:
                    continue
                e = np.array([energies[(s, c, w)] for s in sc.s_values])
                if e.max() > 0:
                    worst = max(worst, (e.max() - e.min()) / e.max())
        res.add("low_order_wave_variation", worst, 0.10, worst <= 0.10)

    if "top_order_growth_exponent" in sc.checks:
        top = np.zeros(len(sc.s_values))
        for c in range(spec.n_components):
            for w in words:
                if hypergeom.word_order(w) == sc.max_order:
                    top += np.array([energies[(s, c, w)] for s in sc.s_values])
        mask = analyzer.default_fit_window(s_arr)
        fit = analyzer.fit_exponent(s_arr[mask], np.sqrt(top[mask]))
        frows.append(("top_order_root_energy", fit.slope, fit.residual))
        res.add("top_order_growth_exponent", fit.slope, 0.2, fit.slope <= 0.2)

    if "kg_decay_slope" in sc.checks:
        c = spec.n_components - 1  # the Klein-Gordon component
        v = np.array([sups[(s, c, "value", "t32")] for s in sc.s_values])
        fit = analyzer.fit_exponent(s_arr, v)
        frows.append(("kg_value_t32_sup", fit.slope, fit.residual))
        res.add("kg_decay_slope", abs(fit.slope), 0.1, abs(fit.slope) <= 0.1)

    if "energy_inequality" in sc.checks:
        root = np.zeros(len(sc.s_values))
        L = np.zeros(len(sc.s_values))
        M = np.zeros(len(sc.s_values))
        for i, sd in enumerate(slices):
            tot = 0.0
            for c in range(spec.n_components):
                tot += energies[(sd.slice.s, c, "")]
                L[i] += analyzer.source_l2(sd, spec, c)
            root[i] = np.sqrt(tot)
            if not spec.is_semilinear():
                M[i] = analyzer.principal_flux_bound(sd, spec)
        chk = analyzer.energy_inequality_check(s_arr, root, L, M,
                                               spec.n_components)
        tol = 1e-3 * max(root[0], 1e-12)
        worst = float(np.max(chk.residual))
        res.add("energy_inequality", worst, tol, worst <= tol)

    write_csv(out / "fits.csv", ("series_id", "slope", "residual"), frows)
    res.files.append(out / "fits.csv")
    return hist, slices


def run_blowup_pair(sc: Scenario, out: Path, res: RunResult):
    data = solver.InitialData([(sc.profile, sc.velocity_profile)], sc.epsilon, sc.B)
    grid = solver.GridParams(h_r=sc.h_r, r_domain=sc.resolved_domain(), cfl=sc.cfl)
    t_end = sc.resolved_t_end()
    probe = solver.evolve(sc.system, data, grid, t_end, sigma_ko=sc.sigma_ko,
                          blowup_ceiling=sc.blowup_ceiling)
    twin = solver.evolve(solver.system_null_twin(), data, grid, t_end,
                         sigma_ko=sc.sigma_ko, blowup_ceiling=sc.blowup_ceiling)
    rows = []
    for name, hist in (("nonull_probe", probe), ("null_twin", twin)):
        rows += [(name, t, v) for t, v in zip(hist.sup_times[::5], hist.sup_series[::5])]
    write_csv(out / "timeseries.csv", ("series", "t", "sup_abs"), rows)
    res.files.append(out / "timeseries.csv")
    res.add("expects_blowup", int(not probe.blowup), 0, probe.blowup)
    horizon_sup = float(np.max(twin.sup_series))
    res.add("null_twin_bounded", horizon_sup, sc.blowup_ceiling,
            (not twin.blowup) and horizon_sup < sc.blowup_ceiling)


def run_sobolev_suite(sc: Scenario, out: Path, res: RunResult):
    """Twenty analytic profiles on a fixed slice at two resolutions."""
    profiles = []
    for lam in (0.5, 0.75, 1.0, 1.5, 2.0):
        profiles.append(f"exp(-(r/{lam})**2)")
        profiles.append(f"exp(-(r/{lam})**2) * (1 + t/15)")
        profiles.append(f"exp(-((r**2-{lam})**2)/(4*{lam}))")
        profiles.append(f"r**2 * exp(-(r/{lam})**2)")
    rows = []
    ratios = {}
    for h in (0.02, 0.01):
        slc = hypergeom.Slice.build(4.0, h)
        for i, expr in enumerate(profiles):
            sd = hypergeom.slice_data_from_expression(slc, expr, max_order=2)
            sob = analyzer.sobolev_check(sd, 0)
            hb = analyzer.hardy_check(sd, 0, "H")
            ratios[(h, i)] = (sob, hb)
            rows.append((f"profile_{i:02d}", h, sob, hb))
    write_csv(out / "sobolev_report.csv",
              ("profile", "h_r", "sobolev_ratio", "hardy_ratio"), rows)
    res.files.append(out / "sobolev_report.csv")
    worst_s = max(ratios[(0.01, i)][0] for i in range(len(profiles)))
    res.add("sobolev_bounded", worst_s, 100.0, np.isfinite(worst_s) and worst_s < 100.0)
    dev_s = max(
        abs(ratios[(0.02, i)][0] - ratios[(0.01, i)][0]) / max(ratios[(0.01, i)][0], 1e-30)
        for i in range(len(profiles)))
    dev_h = max(
        abs(ratios[(0.02, i)][1] - ratios[(0.01, i)][1]) / max(ratios[(0.01, i)][1], 1e-30)
        for i in range(len(profiles)))
    res.add("sobolev_stability", dev_s, 0.05, dev_s <= 0.05)
    res.add("hardy_stability", dev_h, 0.05, dev_h <= 0.05)


def _dalembert(t, r, t0, B, eps):
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


def run_convergence_suite(sc: Scenario, out: Path, res: RunResult):
    rows = []
    hs = (1 / 40, 1 / 80, 1 / 160)
    for label, spec in (("wave", solver.system_linear_wave()),
                        ("kg", solver.system_linear_kg(1.0))):
        sols = {}
        errs = {}
        for h in hs:
            hist = solver.evolve(spec, solver.make_initial("expbump", 0.3, 2.0),
                                 solver.GridParams(h_r=h, r_domain=16.0), 13.0,
                                 sigma_ko=0.0, store_every=10**9)
            t_fin, w, _ = hist.final()
            sols[h] = w[0]
            if label == "wave":
                r = np.arange(w.shape[1]) * h
                errs[h] = float(np.sqrt(np.sum(
                    (w[0] - _dalembert(t_fin, r, 3.0, 2.0, 0.3)) ** 2) * h))
        d1 = float(np.max(np.abs(sols[hs[0]] - sols[hs[1]][::2])))
        d2 = float(np.max(np.abs(sols[hs[1]] - sols[hs[2]][::2])))
        order = float(np.log2(d1 / d2))
        rows.append((f"{label}_richardson", hs[0], d1, ""))
        rows.append((f"{label}_richardson", hs[1], d2, order))
        res.add(f"{label}_self_convergence", order, 3.5, order >= 3.5)
        if label == "wave":
            o1 = float(np.log2(errs[hs[0]] / errs[hs[1]]))
            o2 = float(np.log2(errs[hs[1]] / errs[hs[2]]))
            for h, o in zip(hs, ("", o1, o2)):
                rows.append(("wave_closed_form", h, errs[h], o))
            res.add("closed_form_order", min(o1, o2), 3.5, min(o1, o2) >= 3.5)

    hist = solver.evolve(solver.system_linear_kg(1.0),
                         solver.make_initial("expbump", 0.2, 2.0),
                         solver.GridParams(h_r=1 / 100, r_domain=31.0), 30.0,
                         sigma_ko=0.0, store_every=400)
    ts, es = solver.plane_energy_series(hist, 0, 1.0)
    drift = float(np.max(np.abs(es - es[0])) / es[0])
    rows.append(("kg_plane_energy", 1 / 100, drift, ""))
    res.add("kg_plane_energy_drift", drift, 1e-6, drift <= 1e-6)
    write_csv(out / "convergence.csv", ("case", "h", "error", "order"), rows)
    res.files.append(out / "convergence.csv")


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------


def run(sc: Scenario, out_dir) -> RunResult:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if sc.s_values:
        sc.validate()
    res = RunResult()
    if sc.kind == "algebra":
        run_algebra(sc, out, res)
    elif sc.kind == "nullscan":
        run_nullscan_suite(sc, out, res)
    elif sc.kind == "sobolev":
        run_sobolev_suite(sc, out, res)
    elif sc.kind == "convergence":
        run_convergence_suite(sc, out, res)
    elif sc.kind == "blowup-pair":
        run_blowup_pair(sc, out, res)
    else:
        run_evolution(sc, out, res)
    _emit_checks(out, res)
    return res


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="hypwave",
        description="hyperboloidal-slice diagnostics for wave/Klein-Gordon systems")
    ap.add_argument("command", nargs="?", choices=("verify-algebra", "nullscan"),
                    help="direct subcommand (alternative to --preset)")
    ap.add_argument("--scenario", help="scenario config file (INI)")
    ap.add_argument("--preset", help="named preset scenario")
    ap.add_argument("--out", default="hypwave-out", help="output directory")
    ap.add_argument("--seed", type=int, default=0, help="seed for random form suites")
    ap.add_argument("--resolution", type=float, help="override grid spacing h_r")
    ap.add_argument("--form", help="coefficient file for the nullscan subcommand")
    ap.add_argument("--list-presets", action="store_true")
    args = ap.parse_args(argv)

    if args.list_presets:
        for name in list_presets():
            print(name)
        return 0

    try:
        if args.command == "nullscan":
            if not args.form:
                ap.error("nullscan needs --form <file>")
            res = RunResult()
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            run_nullscan_file(args.form, out, res)
            _emit_checks(out, res)
        else:
            if args.command == "verify-algebra":
                sc = presets()["verify-algebra"]
            elif args.scenario:
                sc = load_scenario(args.scenario)
            elif args.preset:
                if args.preset not in presets():
                    print(f"unknown preset {args.preset!r}; available: "
                          f"{', '.join(list_presets())}", file=sys.stderr)
                    return 2
                sc = presets()[args.preset]
            else:
                ap.error("pick one of --scenario, --preset, verify-algebra, nullscan")
                return 2
            sc = replace(sc, seed=args.seed)
            if args.resolution:
                sc = replace(sc, h_r=args.resolution)
            res = run(sc, args.out)
    except (ValueError, solver.CFLError, solver.BoundaryContaminationError,
            solver.RadialRestrictionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    for cid, val, thr, ok in res.checks:
        print(f"{'PASS' if ok else 'FAIL'}  {cid}  value={fmt(val)} threshold={fmt(thr)}")
    return 0 if res.ok() else 1


if __name__ == "__main__":
    sys.exit(main())
