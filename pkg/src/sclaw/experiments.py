"""Named experiment presets with deterministic seeds and CSV/JSON output.

Each preset binds the library modules into one study, writes its data
files plus a manifest and a machine-readable pass/fail summary into a
run directory, and returns that directory.  Identical (config, seed)
pairs produce byte-identical CSV files regardless of worker count:
every work item derives its seed from the master seed and its position,
and results are merged in item order.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict, replace
from pathlib import Path

import numpy as np

from . import burgers_exact as bx
from . import estimator as es
from . import metrics as mt
from . import random_models as rm
from . import semi_analytic as sa
from . import transport_solver as tp
from .burgers_exact import CASE_I, CASE_II

PRESET_NAMES = (
    "case1-pdf-evolution",
    "case1-moments",
    "case1-convergence",
    "case1-m-estimation",
    "case1-characteristics",
    "case1-bandwidth",
    "case2-analytic",
    "case2-convergence",
    "validate-oracle",
    "validate-positivity",
    "validate-bound",
)

ENV_OUT_DIR = "SCLAW_OUT_DIR"

#: bandwidth scan grids: the dense-sample flatness range and the wider
#: sparse-sample range that brackets the interior optimum
BANDWIDTH_GRID_LARGE_N = (0.005, 0.01, 0.02, 0.05)
BANDWIDTH_GRID_SMALL_N = (0.005, 0.02, 0.1, 0.2, 0.8)


@dataclass
class ExperimentConfig:
    """Run settings; presets fill unset fields with their defaults."""

    preset: str
    case_id: str = CASE_I
    epsilon: float = 0.1
    sigma: float = 0.5
    gamma_shape: float = 2.8
    gamma_scale: float = 0.18
    n_list: list = field(default_factory=list)
    mc_n_list: list = field(default_factory=list)
    h_v: float | None = None
    hv_rule_c: float | None = None
    dt: float | None = None
    t_list: list = field(default_factory=list)
    x_list: list = field(default_factory=list)
    v_lo: float | None = None
    v_hi: float | None = None
    v_points: int = 601
    repeats: int = 20
    seed: int = 0
    out_dir: str | None = None
    jobs: int = 1

    def params(self) -> rm.Params:
        if self.case_id == CASE_I:
            return rm.CaseIParams(sigma=self.sigma)
        return rm.CaseIIParams(shape=self.gamma_shape, scale=self.gamma_scale)

    def v_grid(self, points: int | None = None) -> np.ndarray:
        lo, hi = self.v_lo, self.v_hi
        if lo is None or hi is None:
            dlo, dhi = (mt.CASE_I_V_RANGE if self.case_id == CASE_I
                        else mt.CASE_II_V_RANGE)
            lo = dlo if lo is None else lo
            hi = dhi if hi is None else hi
        return np.linspace(lo, hi, points or self.v_points)

    def bandwidth(self, n: int) -> float:
        if self.h_v is not None and self.hv_rule_c is not None:
            raise ValueError("h_v and hv_rule_c are mutually exclusive")
        if self.hv_rule_c is not None:
            return es.bandwidth_rule(n, self.hv_rule_c)
        return self.h_v if self.h_v is not None else 0.01

    def item_seed(self, group: int, index: int) -> int:
        """Deterministic per-work-item seed, independent of worker count."""
        return self.seed + 100_003 * group + 1_009 * index


_PRESET_DEFAULTS: dict = {
    "case1-pdf-evolution": dict(case_id=CASE_I, t_list=[0.5, 1.0, 2.0, 3.0],
                                x_list=[np.pi]),
    "case1-moments": dict(case_id=CASE_I, t_list=[0.0, 0.5, 1.0, 2.0]),
    "case1-convergence": dict(case_id=CASE_I, t_list=[1.0, 20.0],
                              x_list=[np.pi], n_list=[0, 100, 1000, 10000],
                              mc_n_list=[100, 1000, 10000, 100000], h_v=0.01),
    "case1-m-estimation": dict(case_id=CASE_I, t_list=[1.0], x_list=[np.pi],
                               n_list=[1000, 10000], h_v=0.01),
    "case1-characteristics": dict(case_id=CASE_I, t_list=[1.0],
                                  x_list=[np.pi]),
    "case1-bandwidth": dict(case_id=CASE_I, t_list=[1.0], x_list=[np.pi],
                            n_list=[100, 10000], repeats=10),
    "case2-analytic": dict(case_id=CASE_II, t_list=[0.5, 1.0, 2.0],
                           x_list=[0.95 * np.pi]),
    "case2-convergence": dict(case_id=CASE_II, t_list=[0.5, 1.0],
                              x_list=[0.95 * np.pi],
                              n_list=[0, 100, 1000, 10000], h_v=0.01,
                              repeats=10),
    "validate-oracle": dict(case_id=CASE_I),
    "validate-positivity": dict(case_id=CASE_I, x_list=[np.pi]),
    "validate-bound": dict(case_id=CASE_I, t_list=[0.5, 1.0, 2.0]),
}


def make_config(preset: str, overrides: dict | None = None) -> ExperimentConfig:
    if preset not in PRESET_NAMES:
        raise ValueError(f"unknown preset {preset!r}; known: {PRESET_NAMES}")
    defaults = dict(_PRESET_DEFAULTS[preset])
    if overrides and "hv_rule_c" in overrides and "h_v" not in overrides:
        defaults.pop("h_v", None)
    cfg = ExperimentConfig(preset=preset, **defaults)
    if overrides:
        bad = set(overrides) - set(cfg.__dataclass_fields__)
        if bad:
            raise ValueError(f"unknown config overrides: {sorted(bad)}")
        cfg = replace(cfg, **overrides)
    if cfg.h_v is not None and cfg.hv_rule_c is not None:
        raise ValueError("h_v and hv_rule_c are mutually exclusive")
    return cfg


# ---------------------------------------------------------------------------
# small output helpers
# ---------------------------------------------------------------------------


def _fmt(val) -> str:
    if isinstance(val, (float, np.floating)):
        return f"{float(val):.17g}"
    return str(val)


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _parallel_map(jobs: int, fn, items):
    """Order-preserving map over items with a bounded thread pool."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


class _Assertions:
    def __init__(self):
        self.items = []

    def check(self, name: str, ok: bool, detail: str) -> bool:
        self.items.append({"name": name, "passed": bool(ok), "detail": detail})
        return bool(ok)

    @property
    def all_passed(self) -> bool:
        return all(a["passed"] for a in self.items)


# ---------------------------------------------------------------------------
# shared computations
# ---------------------------------------------------------------------------


def _approx_cdf_run(cfg, t, x, v, n, seed, h):
    """One estimated-drift transport solve; returns (F_hat, l2, linf)."""
    params = cfg.params()
    G = tp.transport_G(cfg.case_id, params)
    ens = rm.draw_samples(cfg.case_id, params, n, seed=seed)
    drift = tp.EstimatedDrift(ens, h_v=h, epsilon=cfg.epsilon)
    xs = np.full(v.shape, x)
    F = tp.approx_cdf(t, xs, v, drift, G, dt=cfg.dt)
    F_ex = sa.exact_cdf(t, xs, v, cfg.case_id, params, cfg.epsilon)
    return F, mt.l2v_error(F, F_ex, v), mt.linf_error(F, F_ex)


def _summarize(values):
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std())


# ---------------------------------------------------------------------------
# preset runners: each returns (files, assertions, extras)
# ---------------------------------------------------------------------------


def _run_pdf_evolution(cfg, out: Path):
    params = cfg.params()
    v = cfg.v_grid()
    x = cfg.x_list[0]
    rows = []
    worst = 0.0
    for t in cfg.t_list:
        xs = np.full(v.shape, x)
        f = sa.exact_pdf(t, xs, v, cfg.case_id, params, cfg.epsilon)
        F = sa.exact_cdf(t, xs, v, cfg.case_id, params, cfg.epsilon)
        worst = max(worst, abs(np.trapezoid(f, v) - (F[-1] - F[0])))
        rows.extend((t, x, vi, fi, Fi) for vi, fi, Fi in zip(v, f, F))
    _write_csv(out / "fig1_pdf.csv", "t,x,v,f_exact,F_exact", rows)
    a = _Assertions()
    a.check("pdf-integrates-to-cdf-mass", worst < 5e-4,
            f"max |int f dv - (F(hi)-F(lo))| = {worst:.3e} < 5e-4")
    return {"fig1_pdf.csv": "exact density and CDF slices over t"}, a, {}


def _run_moments(cfg, out: Path):
    params = cfg.params()
    x = np.linspace(0.0, 2.0 * np.pi, 257)[:-1]
    rows = []
    err0 = 0.0
    for t in cfg.t_list:
        mean, std = sa.moments(t, x, cfg.case_id, params, cfg.epsilon)
        if t == 0.0:
            ref = np.sin(x) if cfg.case_id == CASE_I else (
                params.shape * params.scale * np.sin(x))
            err0 = float(np.abs(mean - ref).max())
        rows.extend(zip(np.full(x.shape, t), x, mean, std))
    _write_csv(out / "fig2_moments.csv", "t,x,mean,std", rows)
    a = _Assertions()
    a.check("initial-mean-matches-datum", err0 < 1e-6,
            f"max |mean(0,x) - E[u0]| = {err0:.3e} < 1e-6")
    return {"fig2_moments.csv": "velocity mean and std over x per t"}, a, {}


def _run_convergence(cfg, out: Path):
    params = cfg.params()
    x = cfg.x_list[0]
    G = tp.transport_G(cfg.case_id, params)
    ledger_rows = []
    fig5_rows = []
    emp_rows = []
    slice_rows = []
    extras = {"estimated": {}, "empirical": {}}
    a = _Assertions()
    repeat_grid = cfg.v_grid(201)
    xr = np.full(repeat_grid.shape, x)
    for it, t in enumerate(cfg.t_list):
        v = cfg.v_grid(201 if t > 2.0 else cfg.v_points)
        xs = np.full(v.shape, x)
        F_ex = sa.exact_cdf(t, xs, v, cfg.case_id, params, cfg.epsilon)
        F_ex_rep = sa.exact_cdf(t, xr, repeat_grid, cfg.case_id, params,
                                cfg.epsilon)
        dt_used = cfg.dt if cfg.dt is not None else tp.default_dt(t)
        n_errors = {}
        for ni, n in enumerate(cfg.n_list):
            if n == 0:
                F0 = tp.zero_sample_cdf(t, xs, v, G)
                l2 = mt.l2v_error(F0, F_ex, v)
                li = mt.linf_error(F0, F_ex)
                ledger_rows.append(mt.ErrorReport(
                    t=t, x=x, variant="zero-sample", n_samples=0, h_v=None,
                    dt=None, l2v_error=l2, linf_error=li, v_lo=v[0],
                    v_hi=v[-1]))
                fig5_rows.append((t, 0, "zero-sample", l2, 0.0, 1))
                slice_rows.extend(
                    (t, x, vi, Fi, "zero-sample", 0) for vi, Fi in zip(v, F0))
                continue
            h = cfg.bandwidth(n)
            repeated = n <= 1000 and t <= 2.0
            reps = cfg.repeats if repeated else 1
            grid = repeat_grid if repeated else v

            def one(r, n=n, h=h, grid=grid, t=t, ni=ni, it=it):
                seedr = cfg.item_seed(it * 16 + ni, r)
                return _approx_cdf_run(cfg, t, x, grid, n, seedr, h)

            results = _parallel_map(cfg.jobs, one, list(range(reps)))
            l2s = [r[1] for r in results]
            lis = [r[2] for r in results]
            l2m, l2std = _summarize(l2s)
            n_errors[str(n)] = l2m
            ledger_rows.append(mt.ErrorReport(
                t=t, x=x, variant="estimated", n_samples=n, h_v=h, dt=dt_used,
                l2v_error=l2m, linf_error=float(np.mean(lis)), v_lo=grid[0],
                v_hi=grid[-1], repeats=reps, l2v_std=l2std))
            fig5_rows.append((t, n, "estimated", l2m, l2std, reps))
            Fh = results[0][0]
            slice_rows.extend(
                (t, x, vi, Fi, "estimated", n) for vi, Fi in zip(grid, Fh))

        # empirical-CDF baseline over repeats (no transport involved)
        emp_errors = {}
        for ni, n in enumerate(cfg.mc_n_list):
            def one_mc(r, n=n, t=t, ni=ni, it=it):
                seedr = cfg.item_seed(64 + it * 16 + ni, r)
                ens = rm.draw_samples(cfg.case_id, params, n, seed=seedr)
                sl = es.build_slice(ens, t, x, cfg.epsilon)
                Fe = mt.empirical_cdf(sl.u_values, repeat_grid)
                return mt.l2v_error(Fe, F_ex_rep, repeat_grid)

            errs = _parallel_map(cfg.jobs, one_mc, list(range(cfg.repeats)))
            m, s = _summarize(errs)
            emp_rows.append((t, n, m, s, cfg.repeats))
            emp_errors[str(n)] = m
        if emp_errors:
            extras["empirical"][f"{t:g}"] = emp_errors
        extras["estimated"][f"{t:g}"] = n_errors

    with open(out / "ledger.csv", "w") as fh:
        fh.write(mt.ErrorReport.CSV_HEADER + "\n")
        for r in ledger_rows:
            fh.write(r.csv_row() + "\n")
    _write_csv(out / "fig5_solver.csv",
               "t,n_samples,variant,l2v_mean,l2v_std,repeats", fig5_rows)
    _write_csv(out / "fig5_empirical.csv",
               "t,n_samples,l2v_mean,l2v_std,repeats", emp_rows)
    early = [r for r in slice_rows if r[0] <= 2.0]
    late = [r for r in slice_rows if r[0] > 2.0]
    _write_csv(out / "fig3_cdf.csv", "t,x,v,F,variant,n_samples", early)
    if late:
        _write_csv(out / "fig4_cdf.csv", "t,x,v,F,variant,n_samples", late)

    # gates; the quantitative windows are anchored to the dense-sample
    # first-case study and evaluated only when that study actually ran
    t0 = cfg.t_list[0]
    est0 = extras["estimated"].get(f"{t0:g}", {})
    emp0 = extras["empirical"].get(f"{t0:g}", {})
    if cfg.case_id == CASE_I and t0 == 1.0 and "10000" in est0:
        a.check("n1e4-l2-window", 5e-5 < est0["10000"] < 1e-3,
                f"L2_v(t=1, N=1e4) = {est0['10000']:.3e} in (5e-5, 1e-3)")
    big_t = [t for t in cfg.t_list if t > 2.0]
    if big_t and "10000" in extras["estimated"].get(f"{big_t[0]:g}", {}):
        val = extras["estimated"][f"{big_t[0]:g}"]["10000"]
        a.check("late-time-l2", val < 1e-2,
                f"L2_v(t={big_t[0]:g}, N=1e4) = {val:.3e} < 1e-2")
    ns = sorted((int(k) for k in est0), key=int)
    if len(ns) >= 3:
        errs = [est0[str(n)] for n in ns]
        inversions = sum(errs[i + 1] >= errs[i] for i in range(len(errs) - 1))
        a.check("error-monotone-in-n", inversions <= 1,
                f"errors {['%.2e' % e for e in errs]} over N={ns}: "
                f"{inversions} inversion(s) <= 1")
    if cfg.case_id == CASE_I and t0 == 1.0:
        for n in ("100", "1000"):
            if n in est0 and n in emp0:
                a.check(f"beats-empirical-n{n}", est0[n] < emp0[n],
                        f"approx {est0[n]:.3e} < empirical {emp0[n]:.3e} "
                        f"at N={n}")
        if len(emp0) >= 3:
            ns_mc = sorted((int(k) for k in emp0))
            slope, _, r2 = mt.rate_fit(ns_mc, [emp0[str(n)] for n in ns_mc])
            extras["mc_slope"] = slope
            a.check("mc-rate-half", -0.6 <= slope <= -0.4,
                    f"empirical-CDF slope {slope:.3f} in [-0.6, -0.4] "
                    f"(r2={r2:.3f})")
    files = {
        "ledger.csv": "one error row per (variant, N, t, x)",
        "fig5_solver.csv": "transport-solver L2 errors vs N",
        "fig5_empirical.csv": "empirical-CDF L2 errors vs N",
        "fig3_cdf.csv": "CDF slices at the early time(s)",
    }
    if late:
        files["fig4_cdf.csv"] = "CDF slices at the late time(s)"
    return files, a, extras


def _run_m_estimation(cfg, out: Path):
    params = cfg.params()
    x = cfg.x_list[0]
    t = cfg.t_list[0]
    v = (np.linspace(-1.5, 1.5, 301) if cfg.case_id == CASE_I
         else cfg.v_grid(301))
    xs = np.full(v.shape, x)
    m_ex = sa.exact_m(t, xs, v, cfg.case_id, params, cfg.epsilon)
    rows = [(t, x, vi, mi, "exact", 0, 0) for vi, mi in zip(v, m_ex)]
    errs = {}
    for ni, n in enumerate(cfg.n_list):
        h = cfg.bandwidth(n)
        ens = rm.draw_samples(cfg.case_id, params, n,
                              seed=cfg.item_seed(0, ni))
        est = es.ConditionalEstimator(
            slice=es.build_slice(ens, t, x, cfg.epsilon), h_v=h)
        m_hat, counts = es.sweep(est, v)
        errs[str(n)] = mt.l2v_error(m_hat, m_ex, v)
        rows.extend((t, x, vi, mi, "estimated", n, ci)
                    for vi, mi, ci in zip(v, m_hat, counts))
    _write_csv(out / "fig6_m.csv", "t,x,v,m,variant,n_samples,n_in_window",
               rows)

    # pointwise relative errors at reference points over N
    rel_rows = []
    for tt, xx in [(2.0, np.pi), (10.0, np.pi)]:
        vv = np.array([0.0, 0.25, 0.5])
        m_ref = sa.exact_m(tt, np.full(vv.shape, xx), vv, cfg.case_id, params,
                           cfg.epsilon)
        for ni, n in enumerate(cfg.n_list):
            h = cfg.bandwidth(n)
            ens = rm.draw_samples(cfg.case_id, params, n,
                                  seed=cfg.item_seed(1, ni))
            est = es.ConditionalEstimator(
                slice=es.build_slice(ens, tt, xx, cfg.epsilon), h_v=h)
            for vi, mr in zip(vv, m_ref):
                mh = es.estimate_m(est, float(vi))
                rel_rows.append((tt, xx, vi, n, mr, mh,
                                 abs(mh - mr) / max(abs(mr), 1e-12)))
    _write_csv(out / "fig6_relerr.csv",
               "t,x,v,n_samples,m_exact,m_hat,rel_err", rel_rows)
    a = _Assertions()
    n_big = str(max(cfg.n_list))
    a.check("m-hat-l2-small", errs[n_big] < 0.05,
            f"L2(m_hat - m) = {errs[n_big]:.3e} < 0.05 at N={n_big}")
    return {
        "fig6_m.csv": "exact and estimated drift sweeps",
        "fig6_relerr.csv": "pointwise drift relative errors vs N",
    }, a, {"m_l2": errs}


def _run_characteristics(cfg, out: Path):
    params = cfg.params()
    x = cfg.x_list[0]
    t = cfg.t_list[0]
    G = tp.transport_G(cfg.case_id, params)
    v = np.linspace(-3.0, 3.0, 200)
    drift = tp.ExactDrift(cfg.case_id, params, cfg.epsilon)
    state, path = tp.trace_back_path(t, np.full(v.shape, x), v, drift,
                                     dt=cfg.dt, record_every=25)
    Gv = np.asarray(G(state.X, state.V))
    _write_csv(out / "fig7_characteristics.csv", "t,x,v,X0,V0,G_at_endpoint",
               [(t, x, vi, Xi, Vi, gi)
                for vi, Xi, Vi, gi in zip(v, state.X, state.V, Gv)])
    sel = np.linspace(0, len(v) - 1, 9).astype(int)
    path_rows = []
    for tau, X, V in path:
        path_rows.extend((v[i], tau, X[i], V[i]) for i in sel)
    _write_csv(out / "fig7_paths.csv", "v_start,tau,X,V", path_rows)
    a = _Assertions()
    drops = float(np.minimum(np.diff(Gv), 0.0).min()) if len(Gv) > 1 else 0.0
    a.check("endpoint-G-nondecreasing", drops >= -1e-9,
            f"largest G decrease along endpoint path = {drops:.2e} >= -1e-9")
    return {
        "fig7_characteristics.csv": "trace endpoints and G values per v",
        "fig7_paths.csv": "sampled full backward paths",
    }, a, {}


def _run_bandwidth(cfg, out: Path):
    params = cfg.params()
    x = cfg.x_list[0]
    t = cfg.t_list[0]
    rows = []
    extras = {}
    a = _Assertions()
    n_small, n_large = min(cfg.n_list), max(cfg.n_list)
    studies = [
        (n_large, BANDWIDTH_GRID_LARGE_N, 1, cfg.v_grid(201)),
        (n_small, BANDWIDTH_GRID_SMALL_N, cfg.repeats, cfg.v_grid(101)),
    ]
    for n, hs, reps, grid in studies:
        curve = []
        for hi, h in enumerate(hs):
            def one(r, h=h, n=n, grid=grid):
                # each repeat reuses one ensemble across all h values so
                # the curve shape is not masked by seed noise
                seedr = cfg.item_seed(0 if n == n_small else 1, r)
                _, l2, _ = _approx_cdf_run(cfg, t, x, grid, n, seedr, h)
                return l2

            errs = _parallel_map(cfg.jobs, one, list(range(reps)))
            m, s = _summarize(errs)
            curve.append(m)
            rows.append((n, h, m, s, reps))
        extras[str(n)] = {f"{h:g}": c for h, c in zip(hs, curve)}
        if n == n_large:
            ratio = max(curve) / min(curve)
            extras["flat_ratio"] = ratio
            a.check("large-n-flat", ratio < 2.0,
                    f"N={n}: max/min error ratio {ratio:.2f} < 2 over "
                    f"h in [{hs[0]}, {hs[-1]}]")
        else:
            imin = int(np.argmin(curve))
            interior = 0 < imin < len(hs) - 1
            ok = interior and curve[0] > curve[imin] and curve[-1] > curve[imin]
            a.check("small-n-interior-optimum", ok,
                    f"N={n}: optimum h={hs[imin]:g} interior to "
                    f"[{hs[0]}, {hs[-1]}]; curve "
                    + " ".join(f"{h:g}:{e:.2e}" for h, e in zip(hs, curve)))
    _write_csv(out / "fig8_bandwidth.csv",
               "n_samples,h_v,l2v_mean,l2v_std,repeats", rows)
    return {"fig8_bandwidth.csv": "CDF error vs bandwidth per N"}, a, extras


def _run_case2_analytic(cfg, out: Path):
    params = cfg.params()
    x = cfg.x_list[0]
    G = tp.transport_G(cfg.case_id, params)
    a = _Assertions()
    rows = []
    min_f_exact = np.inf
    min_f_s0_t1 = np.inf
    for t in cfg.t_list:
        hi = min(cfg.v_grid()[-1], x / t * (1.0 - 1e-9))
        v = np.linspace(1e-6, hi, cfg.v_points)
        xs = np.full(v.shape, x)
        f = sa.exact_pdf(t, xs, v, cfg.case_id, params, cfg.epsilon)
        F = sa.exact_cdf(t, xs, v, cfg.case_id, params, cfg.epsilon)
        F0 = tp.zero_sample_cdf(t, xs, v, G)
        f0 = tp.zero_sample_pdf(t, xs, v, cfg.case_id, params)
        min_f_exact = min(min_f_exact, float(f.min()))
        if t == 1.0:
            min_f_s0_t1 = float(f0.min())
        rows.extend(zip(np.full(v.shape, t), xs, v, f, F, f0, F0))
    _write_csv(out / "fig9_fig10_analytic.csv",
               "t,x,v,f_exact,F_exact,f_s0,F_s0", rows)
    a.check("exact-pdf-nonnegative", min_f_exact >= -1e-12,
            f"min exact pdf = {min_f_exact:.3e} >= -1e-12")
    a.check("zero-sample-pdf-positive-here", min_f_s0_t1 >= 0.0,
            f"min f_s0(t=1, x=0.95pi) = {min_f_s0_t1:.3e} >= 0")
    m0 = sa.exact_m(0.0, 1.3, 0.4, cfg.case_id, params, cfg.epsilon)
    a.check("initial-drift-linear", abs(m0 + cfg.epsilon * 0.4) < 1e-8,
            f"m(0, 1.3, 0.4) = {m0:.10f} vs -eps*v = {-cfg.epsilon * 0.4:.10f}")
    return {"fig9_fig10_analytic.csv": "exact vs zero-sample slices"}, a, {}


def _run_validate_oracle(cfg, out: Path):
    t0 = time.monotonic()
    rows = []
    worst = 0.0
    for case_id, xi in [(CASE_I, 0.0), (CASE_II, 0.3), (CASE_II, 0.8)]:
        sol = bx.build_solution(case_id, cfg.epsilon, xi=xi)
        for t in (0.5, 1.0, 2.0):
            x = np.linspace(0.0, 2.0 * np.pi, 2048, endpoint=False)
            u_fd = bx.fd_oracle(case_id, cfg.epsilon, t, grid_points=2048,
                                xi=xi)
            u_ex = sol.u_eval(t, x)
            err = float(np.max(np.abs(u_fd - u_ex)))
            worst = max(worst, err)
            rows.append((case_id, xi, t, 2048, err))
    elapsed = time.monotonic() - t0
    _write_csv(out / "validate_oracle.csv", "case,xi,t,grid_points,max_err",
               rows)
    a = _Assertions()
    a.check("series-vs-fd", worst < 1e-3,
            f"max |u_series - u_fd| = {worst:.3e} < 1e-3 over {len(rows)} runs")
    a.check("oracle-runtime", elapsed < 120.0,
            f"oracle comparisons took {elapsed:.1f}s < 120s")
    return {"validate_oracle.csv": "independent-scheme agreement per run"}, a, {
        "max_err": worst, "elapsed_s": elapsed}


def _run_validate_positivity(cfg, out: Path):
    params = cfg.params()
    x = cfg.x_list[0]
    G = tp.transport_G(cfg.case_id, params)
    v = np.linspace(-3.0, 3.0, 601)
    a = _Assertions()
    rows = []
    results = {}

    def zs(tt, xx, vv):
        return tp.zero_sample_cdf(tt, xx, vv, G)

    for t in (0.5, 0.99, 2.0):
        f0 = tp.zero_sample_pdf(t, np.full(v.shape, x), v, cfg.case_id, params)
        fx = sa.exact_pdf(t, np.full(v.shape, x), v, cfg.case_id, params,
                          cfg.epsilon)
        slope, v_at = tp.positivity_scan(zs, t, x, v)
        rows.extend((t, x, vi, ai, bi) for vi, ai, bi in zip(v, f0, fx))
        results[f"{t:g}"] = dict(min_f_s0=float(f0.min()),
                                 min_f_exact=float(fx.min()),
                                 min_slope=slope, v_at_min=v_at)
    _write_csv(out / "validate_positivity.csv", "t,x,v,f_s0,f_exact", rows)
    a.check("anomaly-at-t2", results["2"]["min_f_s0"] < 0.0,
            f"min f_s0(2, pi) = {results['2']['min_f_s0']:.3f} < 0")
    a.check("no-anomaly-before-shock", results["0.99"]["min_f_s0"] >= 0.0,
            f"min f_s0(0.99, pi) = {results['0.99']['min_f_s0']:.3e} >= 0")
    a.check("monotone-at-t05", results["0.5"]["min_slope"] >= -1e-12,
            f"min CDF slope at t=0.5: {results['0.5']['min_slope']:.3e}")
    a.check("violation-at-t2", results["2"]["min_slope"] < 0.0,
            f"min CDF slope at t=2: {results['2']['min_slope']:.3f} < 0")
    worst_exact = min(r["min_f_exact"] for r in results.values())
    a.check("exact-pdf-nonnegative", worst_exact >= -1e-12,
            f"min exact pdf over scans = {worst_exact:.3e} >= -1e-12")

    def grad_G(x0, v0):
        return rm.initial_cdf_gradient(cfg.case_id, params, x0, v0)

    pts = np.array([(xx, vv) for xx in np.linspace(0.1, 2 * np.pi - 0.1, 25)
                    for vv in (-0.5, 0.0, 0.5)])
    cert = tp.monotonicity_certificate(grad_G, 1.0, pts)
    results["certificate"] = {
        "passed": cert.passed,
        "witness": list(cert.witness) if cert.witness else None,
        "blow_up_time": cert.blow_up_time,
    }
    if not cert.passed:
        x0, v0 = cert.witness
        ts = 1.1 * cert.blow_up_time
        slope, _ = tp.positivity_scan(
            zs, ts, x0 + v0 * ts, np.linspace(v0 - 1.5, v0 + 1.5, 201))
        a.check("witness-scan-negative", slope < 0.0,
                f"slope {slope:.3f} < 0 at 1.1*t* = {ts:.2f}")
    return {"validate_positivity.csv": "zero-sample vs exact densities"}, a, results


def _run_validate_bound(cfg, out: Path):
    params = cfg.params()
    G = tp.transport_G(cfg.case_id, params)
    delta = 1e-3
    a = _Assertions()
    rows = []
    xg = np.linspace(0.0, 2.0 * np.pi, 201)
    vg = np.linspace(-3.0, 3.0, 601)
    gx, gv = rm.initial_cdf_gradient(cfg.case_id, params, xg[:, None],
                                     vg[None, :])
    grad_G_inf = float(np.sqrt(gx * gx + gv * gv).max())
    for t in cfg.t_list:
        grad_m_inf = 0.0
        for tau in np.linspace(max(t / 3.0, 1e-3), t, 3):
            M = sa.exact_m(tau, np.broadcast_to(xg[:, None], (201, 601)),
                           np.broadcast_to(vg[None, :], (201, 601)),
                           cfg.case_id, params, cfg.epsilon)
            dmx = np.gradient(M, xg, axis=0)
            dmv = np.gradient(M, vg, axis=1)
            grad_m_inf = max(grad_m_inf,
                             float(np.sqrt(dmx * dmx + dmv * dmv).max()))
        xm = np.linspace(0.0, 2.0 * np.pi, 21)
        vm = np.linspace(-2.0, 2.0, 61)
        xmg = np.broadcast_to(xm[:, None], (21, 61))
        vmg = np.broadcast_to(vm[None, :], (21, 61))
        drift = tp.SyntheticPerturbedDrift(
            tp.ExactDrift(cfg.case_id, params, cfg.epsilon), delta)
        F_hat = tp.approx_cdf(t, xmg, vmg, drift, G, dt=cfg.dt)
        F_ex = sa.exact_cdf(t, xmg.ravel(), vmg.ravel(), cfg.case_id, params,
                            cfg.epsilon).reshape(xmg.shape)
        measured = float(np.abs(F_hat - F_ex).max())
        bound = mt.drift_error_bound(t, 1.0, grad_m_inf, grad_G_inf, delta)
        rows.append((t, delta, measured, bound, grad_m_inf, grad_G_inf))
        a.check(f"bound-holds-t{t:g}", measured <= bound,
                f"sup|F - F_hat| = {measured:.3e} <= bound {bound:.3e} "
                f"(|grad m|={grad_m_inf:.2f}, |grad G|={grad_G_inf:.2f})")
    _write_csv(out / "validate_bound.csv",
               "t,delta,measured_sup,bound,grad_m_inf,grad_G_inf", rows)
    return {"validate_bound.csv": "measured sup-error vs certified bound"}, a, {}


_RUNNERS = {
    "case1-pdf-evolution": _run_pdf_evolution,
    "case1-moments": _run_moments,
    "case1-convergence": _run_convergence,
    "case1-m-estimation": _run_m_estimation,
    "case1-characteristics": _run_characteristics,
    "case1-bandwidth": _run_bandwidth,
    "case2-analytic": _run_case2_analytic,
    "case2-convergence": _run_convergence,
    "validate-oracle": _run_validate_oracle,
    "validate-positivity": _run_validate_positivity,
    "validate-bound": _run_validate_bound,
}

_SCHEMA_NOTES = {
    "ledger.csv": mt.ErrorReport.CSV_HEADER,
    "fig1_pdf.csv": "t,x,v,f_exact,F_exact",
    "fig2_moments.csv": "t,x,mean,std",
    "fig3_cdf.csv": "t,x,v,F,variant,n_samples",
    "fig4_cdf.csv": "t,x,v,F,variant,n_samples",
    "fig5_solver.csv": "t,n_samples,variant,l2v_mean,l2v_std,repeats",
    "fig5_empirical.csv": "t,n_samples,l2v_mean,l2v_std,repeats",
    "fig6_m.csv": "t,x,v,m,variant,n_samples,n_in_window",
    "fig6_relerr.csv": "t,x,v,n_samples,m_exact,m_hat,rel_err",
    "fig7_characteristics.csv": "t,x,v,X0,V0,G_at_endpoint",
    "fig7_paths.csv": "v_start,tau,X,V",
    "fig8_bandwidth.csv": "n_samples,h_v,l2v_mean,l2v_std,repeats",
    "fig9_fig10_analytic.csv": "t,x,v,f_exact,F_exact,f_s0,F_s0",
    "validate_oracle.csv": "case,xi,t,grid_points,max_err",
    "validate_positivity.csv": "t,x,v,f_s0,f_exact",
    "validate_bound.csv": "t,delta,measured_sup,bound,grad_m_inf,grad_G_inf",
}


def _write_schema(out: Path, files: dict) -> None:
    lines = ["# Output schema", "",
             "Columns of each CSV produced by this run.", ""]
    for name in sorted(files):
        lines.append(f"## {name}")
        lines.append("")
        lines.append(files[name])
        cols = _SCHEMA_NOTES.get(name)
        if cols:
            lines.append("")
            lines.append(f"Columns: `{cols}`")
        lines.append("")
    (out / "SCHEMA.md").write_text("\n".join(lines))


def resolve_out_dir(cfg: ExperimentConfig) -> Path:
    """Run directory: <root>/<preset>, root from env var or config."""
    root = os.environ.get(ENV_OUT_DIR) or cfg.out_dir or "runs"
    return Path(root) / cfg.preset


def run_preset(name: str, overrides: dict | None = None) -> Path:
    """Run one preset; returns the artifact directory.

    The run passed when summary.json has "passed": true.
    """
    cfg = make_config(name, overrides)
    out = resolve_out_dir(cfg)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()
    files, asserts, extras = _RUNNERS[name](cfg, out)
    wall = time.monotonic() - t0
    _write_schema(out, files)
    manifest = {
        "preset": name,
        "config": asdict(cfg),
        "seed_scheme": ("item_seed(group, index) = "
                        "seed + 100003*group + 1009*index"),
        "versions": {
            "numpy": np.__version__,
            "scipy": __import__("scipy").__version__,
        },
        "wall_time_s": round(wall, 3),
        "files": sorted(files),
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, default=float) + "\n")
    summary = {"preset": name, "passed": asserts.all_passed,
               "assertions": asserts.items, "metrics": extras}
    (out / "summary.json").write_text(
        json.dumps(summary, indent=2, default=float) + "\n")
    return out
