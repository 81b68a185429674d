"""Error norms, the sampling baseline, and rate/bound evaluation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: default value grids for error norms: covers the bulk of the value
#: law for each ensemble at the tested positions
CASE_I_V_RANGE = (-3.0, 3.0)
CASE_II_V_RANGE = (0.0, 1.2)
V_GRID_POINTS = 601


def default_v_grid(case_id: str, points: int = V_GRID_POINTS) -> np.ndarray:
    lo, hi = CASE_I_V_RANGE if case_id == "I" else CASE_II_V_RANGE
    return np.linspace(lo, hi, points)


@dataclass(frozen=True)
class ErrorReport:
    """One measured error row: which variant, at what size, how wrong."""

    t: float
    x: float
    variant: str
    n_samples: int
    h_v: float | None
    dt: float | None
    l2v_error: float
    linf_error: float
    v_lo: float
    v_hi: float
    repeats: int = 1
    l2v_std: float = 0.0

    CSV_HEADER = ("t,x,variant,n_samples,h_v,dt,l2v_error,linf_error,"
                  "v_lo,v_hi,repeats,l2v_std")

    def csv_row(self) -> str:
        def fmt(val):
            if val is None:
                return ""
            if isinstance(val, float):
                return f"{val:.17g}"
            return str(val)

        return ",".join(fmt(v) for v in (
            self.t, self.x, self.variant, self.n_samples, self.h_v, self.dt,
            self.l2v_error, self.linf_error, self.v_lo, self.v_hi,
            self.repeats, self.l2v_std,
        ))


def l2v_error(values_a, values_b, v_grid) -> float:
    """Trapezoid-rule L2 distance in v between two CDF slices."""
    a = np.asarray(values_a, dtype=float)
    b = np.asarray(values_b, dtype=float)
    v = np.asarray(v_grid, dtype=float)
    if a.shape != v.shape or b.shape != v.shape:
        raise ValueError("slices must share the v_grid shape")
    d = a - b
    return float(np.sqrt(np.trapezoid(d * d, v)))


def linf_error(values_a, values_b) -> float:
    a = np.asarray(values_a, dtype=float)
    b = np.asarray(values_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("slices must share shape")
    return float(np.max(np.abs(a - b)))


def empirical_cdf(u_samples, v):
    """Step CDF of the samples: (1/N) * #{u_i <= v}."""
    u = np.sort(np.asarray(u_samples, dtype=float))
    if len(u) == 0:
        raise ValueError("empirical_cdf needs at least one sample")
    v = np.asarray(v, dtype=float)
    out = np.searchsorted(u, v, side="right") / len(u)
    return float(out) if np.isscalar(v) or v.ndim == 0 else out


def rate_fit(n_values, error_values) -> tuple[float, float, float]:
    """OLS fit of log(error) against log(n); returns (slope, intercept, r2)."""
    n = np.asarray(n_values, dtype=float)
    e = np.asarray(error_values, dtype=float)
    if len(n) < 3 or len(n) != len(e):
        raise ValueError("need at least 3 paired points")
    if np.any(n <= 0) or np.any(e <= 0):
        raise ValueError("rate_fit needs positive inputs")
    ln, le = np.log(n), np.log(e)
    slope, intercept = np.polyfit(ln, le, 1)
    resid = le - (slope * ln + intercept)
    ss_tot = float(np.sum((le - le.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def drift_error_bound(t: float, g2_bound: float, grad_m_inf: float,
                      grad_G_inf: float, m_error_inf: float) -> float:
    """Sup-norm CDF error bound from a sup-norm drift error.

    exp((C + |grad m|_inf) * t) * |grad G|_inf * |m - m_hat|_inf * t,
    where C bounds |g''| (C = 1 for Burgers).  Vanishes with either the
    drift error or the horizon.
    """
    for name, val in (("t", t), ("g2_bound", g2_bound),
                      ("grad_m_inf", grad_m_inf), ("grad_G_inf", grad_G_inf),
                      ("m_error_inf", m_error_inf)):
        if val < 0:
            raise ValueError(f"{name} must be nonnegative")
    return float(np.exp((g2_bound + grad_m_inf) * t)
                 * grad_G_inf * m_error_inf * t)
