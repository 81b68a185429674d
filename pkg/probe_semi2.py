import time
import numpy as np
import sys
sys.path.insert(0, "src")
from sclaw import semi_analytic as sa
from sclaw import random_models as rm

p1 = rm.CaseIParams()
p2 = rm.CaseIIParams()

# pdf normalization: integrate f over v at fixed (t, x)
for case, p, vlo, vhi, x in [("I", p1, -3.0, 3.0, 2.0), ("II", p2, 1e-9, None, 2.0)]:
    for t in (0.5, 1.0, 2.0):
        hi = vhi if vhi is not None else x / t * (1 - 1e-9)
        v = np.linspace(vlo, hi, 2001)
        xs = np.full(v.shape, x)
        t0 = time.time()
        f = sa.exact_pdf(t, xs, v, case, p)
        el = time.time() - t0
        integral = np.trapezoid(f, v)
        print(f"{case} t={t} x={x}: int f dv = {integral:.8f}  min f = {f.min():.3e}  [{el:.2f}s / 2001 pts]")

# CDF consistency: F(t,x,v) matches numerically integrated density
v = np.linspace(-2.0, 2.0, 801)
xs = np.full(v.shape, 2.0)
F = sa.exact_cdf(1.0, xs, v, "I", p1)
f = sa.exact_pdf(1.0, xs, v, "I", p1)
Fnum = np.concatenate([[0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(v))]) + F[0]
print("I  max |F - cumint f| =", np.abs(F - Fnum).max())

# long-time: at t=100, x=pi, case I  ->  F should be ~ Phi(v / 0.5)-ish (limit N(0, 0.25))
for vv in (-0.5, 0.0, 0.5):
    F = sa.exact_cdf(100.0, np.pi, vv, "I", p1)
    from scipy.special import ndtr
    print(f"I t=100 x=pi v={vv:+.1f}: F={F:.6f}  N(0,0.25) ref={ndtr(vv/0.5):.6f}")

# moments sanity: case I mean at t=0 should be sin x, std = sigma
m, s = sa.moments(0.0, np.array([0.5, 2.0]), "I", p1)
print("I t=0 mean:", m, " (sin:", np.sin([0.5, 2.0]), ") std:", s)
m, s = sa.moments(1.0, np.array([0.5, 2.0, 4.0]), "I", p1)
print("I t=1 mean:", m, "std:", s)
m2, s2 = sa.moments(1.0, np.array([0.5, 1.5, 2.5]), "II", p2)
print("II t=1 mean:", m2, "std:", s2)
# case II t=0: mean = k*theta*sin x, var = k*theta^2*sin^2 x
m2, s2 = sa.moments(0.0, np.array([0.5, 1.5]), "II", p2)
ref_m = 2.8 * 0.18 * np.sin([0.5, 1.5])
ref_s = np.sqrt(2.8) * 0.18 * np.sin([0.5, 1.5])
print("II t=0 mean err:", np.abs(m2 - ref_m).max(), "std err:", np.abs(s2 - ref_s).max())
