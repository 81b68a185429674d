"""Backward characteristic tracing for the value-distribution transport.

The approximate CDF solves a linear transport equation in (x, v) whose
characteristics obey

    dX/ds = g'(V),    dV/ds = m(s, X, V),

with g the flux (g'(v) = v for Burgers) and m the conditional
dissipation drift.  Tracing backward from (x, v) at time t to s = 0 and
reading the initial CDF G off the endpoint gives F_hat(t, x, v) =
G(X(0), V(0)).  Dropping the drift entirely yields the closed-form
zero-sample baseline G(x - g'(v) t, v), which loses v-monotonicity
after shocks form; the scan and certificate helpers quantify that.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import burgers_exact as bx
from . import estimator as es
from . import random_models as rm
from . import semi_analytic as sa
from .burgers_exact import CASE_I, CASE_II, TWO_PI

#: Euler defaults keep time-discretization error below sampling error
DT_SHORT = 1e-3
DT_LONG = 1e-2
DT_SWITCH_T = 2.0

_CACHE = bx.SolutionCache()


def clear_caches() -> None:
    _CACHE.clear()


def default_dt(t: float) -> float:
    return DT_SHORT if t <= DT_SWITCH_T else DT_LONG


def burgers_flux_deriv(v):
    return v


@dataclass(frozen=True)
class CharacteristicState:
    """Backward-trace endpoint; X wrapped to [0, 2*pi)."""

    X: np.ndarray
    V: np.ndarray
    tau: float


class TraceDiagnostics(RuntimeError):
    """Non-finite drift encountered while tracing."""


# ---------------------------------------------------------------------------
# drift variants
# ---------------------------------------------------------------------------


class ZeroDrift:
    """Drops the dissipation term; characteristics keep V constant."""

    def values(self, tau, x, v, ctx):
        return np.zeros_like(np.asarray(v, dtype=float))


class ExactDrift:
    """Semi-analytic drift eps*E[u_xx | u = v] along the trace.

    The parameter root xi(tau, X, V) varies slowly along a
    characteristic, so case I warm-starts a safeguarded Newton
    iteration from the previous node's roots and falls back to
    bisection when it stalls.  Case II re-inverts by bisection at each
    node (statuses can change as the trace moves).
    """

    def __init__(self, case_id: str, params: rm.Params, epsilon: float = 0.1):
        rm._validate_pair(case_id, params)
        self.case_id = case_id
        self.params = params
        self.epsilon = epsilon

    def _case1_roots(self, fe, tau, x, v, warm):
        xi = warm
        if xi is None or xi.shape != v.shape:
            return sa._invert_case1(fe, tau, x, v, sa.DEFAULT_TOL_V)
        for _ in range(30):
            y = x - xi * tau
            u, ux = fe.u_ux(y)
            r = u + xi - v
            if np.max(np.abs(r)) < sa.DEFAULT_TOL_V:
                return xi
            step = r / (1.0 - tau * ux)
            np.clip(step, -0.5, 0.5, out=step)
            xi = xi - step
        return sa._invert_case1(fe, tau, x, v, sa.DEFAULT_TOL_V)

    def values(self, tau, x, v, ctx):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.case_id == CASE_I:
            fe = bx.FrozenTimeEval(_CACHE.get(CASE_I, self.epsilon, 0.0), tau)
            xi = self._case1_roots(fe, tau, x, v, ctx.get("xi"))
            ctx["xi"] = xi
            _, _, uxx = fe.u_ux_uxx(x - xi * tau)
            return self.epsilon * uxx
        xi, status = sa._invert_case2(
            self.epsilon, self.params, tau, x, v, sa.DEFAULT_TOL_V
        )
        m = np.zeros(v.shape)
        ok = status == 0
        if ok.any():
            table = bx.build_table(CASE_II, self.epsilon, xi[ok])
            _, _, uxx = table.velocities(tau, x[ok], need_uxx=True)
            m[ok] = self.epsilon * uxx
        return m


class EstimatedDrift:
    """Sample-based drift; window queries answered per Euler node.

    strategy 'monotone' (the 'auto' default) runs the batched
    parameter-bisection engine and never materializes full slices;
    strategy 'slice' builds a full sample slice lazily per node
    position and caches it, the literal one-point design.
    """

    def __init__(self, ensemble: rm.InitialEnsemble, h_v: float,
                 epsilon: float = 0.1, strategy: str = "auto"):
        if not h_v > 0:
            raise ValueError("bandwidth h_v must be positive")
        if strategy not in ("auto", "monotone", "slice"):
            raise ValueError(f"unknown strategy {strategy!r}")
        self.ensemble = ensemble
        self.h_v = h_v
        self.epsilon = epsilon
        self.strategy = "monotone" if strategy == "auto" else strategy
        self.n = len(ensemble)
        self._engine = None
        self._slices: dict = {}
        self._lock = threading.Lock()

    def _monotone(self):
        if self._engine is None:
            self._engine = es.MonotoneWindowEngine(self.ensemble, self.epsilon)
        return self._engine

    def _slice_at(self, tau, x):
        key = (round(float(tau), 12), round(float(x), 9))
        with self._lock:
            sl = self._slices.get(key)
        if sl is None:
            sl = es.build_slice(self.ensemble, tau, x, self.epsilon)
            with self._lock:
                sl = self._slices.setdefault(key, sl)
        return sl

    def values(self, tau, x, v, ctx):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.strategy == "monotone":
            m, _ = self._monotone().query(tau, x, v, self.h_v)
            return m
        out = np.empty(v.shape)
        for i in range(v.size):
            sl = self._slice_at(tau, x.flat[i])
            est = es.ConditionalEstimator(slice=sl, h_v=self.h_v)
            out.flat[i] = es.estimate_m(est, float(v.flat[i]))
        return out


class SyntheticPerturbedDrift:
    """Base drift plus a known perturbation (constant or callable)."""

    def __init__(self, base, delta):
        self.base = base
        self.delta = delta

    def values(self, tau, x, v, ctx):
        m = self.base.values(tau, x, v, ctx)
        d = self.delta(tau, x, v) if callable(self.delta) else self.delta
        return m + d


# ---------------------------------------------------------------------------
# tracing
# ---------------------------------------------------------------------------


def trace_back(t, x, v, drift, dt: float | None = None,
               flux_deriv=burgers_flux_deriv) -> CharacteristicState:
    """Explicit Euler backward from (x, v) at time t to time 0.

    x and v may be arrays of equal shape; the whole bundle is stepped
    together so drift variants can batch their node queries.  The last
    step is shortened when t is not a multiple of dt.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if dt is None:
        dt = default_dt(t)
    if not dt > 0:
        raise ValueError("dt must be positive")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if x.shape != v.shape:
        raise ValueError("x and v must have equal shapes")
    shape = x.shape
    X = np.mod(x.ravel(), TWO_PI)
    V = v.ravel().copy()
    n_steps = max(int(np.ceil(t / dt - 1e-12)), 0)
    ctx: dict = {}
    for k in range(n_steps):
        tau = t - k * dt
        tau_next = t - (k + 1) * dt if k + 1 < n_steps else 0.0
        step = tau - tau_next
        m = np.asarray(drift.values(tau, X, V, ctx), dtype=float)
        if not np.all(np.isfinite(m)):
            i = int(np.flatnonzero(~np.isfinite(m))[0])
            raise TraceDiagnostics(
                f"non-finite drift at tau={tau:.6g}, X={X.flat[i]:.6g}, "
                f"V={V.flat[i]:.6g}"
            )
        X = np.mod(X - step * np.asarray(flux_deriv(V), dtype=float), TWO_PI)
        V = V - step * m
    return CharacteristicState(X=X.reshape(shape), V=V.reshape(shape), tau=0.0)


def transport_G(case_id: str, params: rm.Params):
    """Initial-value CDF G(x, v) on the full wrapped periodic domain.

    Case I is smooth everywhere.  Case II flips the amplitude
    inequality where sin x < 0, giving the survival form there, and
    degenerates to the step 1_{v >= 0} at sin x = 0.
    """
    rm._validate_pair(case_id, params)
    if case_id == CASE_I:
        def G(x, v):
            return rm.initial_cdf_G(CASE_I, params, np.mod(x, TWO_PI), v)
        return G

    shape, scale = params.shape, params.scale

    def G(x, v):
        x = np.mod(np.asarray(x, dtype=float), TWO_PI)
        v = np.asarray(v, dtype=float)
        x, v = np.broadcast_arrays(x, v)
        s = np.sin(x)
        out = np.where(v >= 0, 1.0, 0.0)
        ratio = np.divide(v, s, out=np.zeros_like(out), where=s != 0)
        body = special.gammainc(shape, np.maximum(ratio, 0.0) / scale)
        out = np.where(s > 0, body, out)
        out = np.where(s < 0, 1.0 - body, out)
        return out[()] if out.ndim == 0 else out

    return G


def approx_cdf(t, x, v, drift, G, dt: float | None = None,
               flux_deriv=burgers_flux_deriv):
    """F_hat(t, x, v) = G(trace endpoint); x, v broadcast together."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    scalar = x.ndim == 0 and v.ndim == 0
    xb, vb = np.broadcast_arrays(x, v)
    state = trace_back(t, xb, vb, drift, dt=dt, flux_deriv=flux_deriv)
    out = np.asarray(G(state.X, state.V))
    out = out.reshape(xb.shape) if not scalar else out
    return float(out.flat[0]) if scalar else out


# ---------------------------------------------------------------------------
# zero-sample closed forms
# ---------------------------------------------------------------------------


def zero_sample_cdf(t, x, v, G, flux_deriv=burgers_flux_deriv):
    """Drift-free solution G(x - g'(v) t, v); exact for any t, dt-free."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    return G(np.mod(x - np.asarray(flux_deriv(v), dtype=float) * t, TWO_PI), v)


def zero_sample_pdf(t, x, v, case_id: str, params: rm.Params):
    """Drift-free density, by differentiating the closed form in v.

    Case I: phi((v - sin y)/sigma)/sigma * (1 + t cos y) with
    y = x - v t; the second factor goes negative once t > 1, which is
    the monotonicity loss this module diagnoses.  Case II (valid for
    0 < v < x/t with the shifted position in (0, pi)):
    p_gamma(v/sin y) * (sin y + v t cos y) / sin^2 y.
    """
    rm._validate_pair(case_id, params)
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    y = x - v * t
    if case_id == CASE_I:
        z = (v - np.sin(y)) / params.sigma
        dens = np.exp(-0.5 * z * z) / (params.sigma * np.sqrt(2.0 * np.pi))
        return dens * (1.0 + t * np.cos(y))
    yw = np.mod(y, TWO_PI)
    s = np.sin(yw)
    if np.any(s <= 0):
        raise ValueError("case II zero-sample pdf needs x - v*t in (0, pi)")
    return rm.xi_pdf(CASE_II, params, v / s) * (s + v * t * np.cos(yw)) / (s * s)


# ---------------------------------------------------------------------------
# monotonicity diagnostics
# ---------------------------------------------------------------------------


def positivity_scan(cdf_fn, t, x, v_grid):
    """Minimum forward-difference slope of v -> cdf_fn(t, x, v).

    Returns (min_slope, v_at_min); a negative value certifies a
    monotonicity violation of the scanned CDF at (t, x).
    """
    v = np.asarray(v_grid, dtype=float)
    if v.ndim != 1 or len(v) < 16:
        raise ValueError("v_grid must be 1-d with at least 16 points")
    if np.any(np.diff(v) <= 0):
        raise ValueError("v_grid must be strictly increasing")
    F = np.asarray(cdf_fn(t, x, v), dtype=float)
    slopes = np.diff(F) / np.diff(v)
    i = int(np.argmin(slopes))
    return float(slopes[i]), float(v[i])


@dataclass(frozen=True)
class CertificateResult:
    """Outcome of the pointwise monotonicity-preservation check."""

    passed: bool
    witness: tuple[float, float] | None
    blow_up_time: float | None


def monotonicity_certificate(G_gradient_fn, flux_second_deriv,
                             sample_points) -> CertificateResult:
    """Check the sign condition g''(v) * dG/dx <= 0 pointwise.

    The drift-free transport keeps the CDF monotone in v for all times
    exactly when the condition holds everywhere.  On failure the
    witness with the earliest predicted violation time
    t* = (dG/dv) / (g'' * dG/dx) is returned; scanning the zero-sample
    CDF shortly after t* along the witness characteristic exhibits a
    negative slope.
    """
    pts = np.asarray(sample_points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("sample_points must be an (n, 2) array of (x, v)")
    best = None
    for x0, v0 in pts:
        gx, gv = G_gradient_fn(x0, v0)
        g2 = flux_second_deriv(v0) if callable(flux_second_deriv) else flux_second_deriv
        prod = g2 * gx
        if prod <= 0:
            continue
        t_star = gv / prod
        if best is None or t_star < best[0]:
            best = (float(t_star), float(x0), float(v0))
    if best is None:
        return CertificateResult(passed=True, witness=None, blow_up_time=None)
    t_star, x0, v0 = best
    return CertificateResult(passed=False, witness=(x0, v0), blow_up_time=t_star)


def slices_to_csv(path, rows) -> None:
    """CDF/PDF slice export; columns t,x,v,F_hat,f_hat,variant,N,h_v,dt.

    ``rows`` yields dicts with those keys (f_hat/h_v/dt may be
    missing; written as empty fields).
    """
    cols = ["t", "x", "v", "F_hat", "f_hat", "variant", "N", "h_v", "dt"]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            out = []
            for c in cols:
                val = row.get(c, "")
                if isinstance(val, float):
                    out.append(f"{val:.17g}")
                else:
                    out.append(str(val))
            fh.write(",".join(out) + "\n")
