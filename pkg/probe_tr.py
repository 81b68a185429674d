import time
import numpy as np, sys
sys.path.insert(0, "src")
from sclaw import transport_solver as tp
from sclaw import semi_analytic as sa
from sclaw import random_models as rm
from sclaw import estimator as es
from sclaw import metrics as mt

p1 = rm.CaseIParams(); p2 = rm.CaseIIParams()
G1 = tp.transport_G("I", p1)
G2 = tp.transport_G("II", p2)

# 1. zero-drift equivalence and t=0 identity
v = np.linspace(-3, 3, 201)
x = np.full(v.shape, np.pi)
a = tp.approx_cdf(1.7, x, v, tp.ZeroDrift(), G1, dt=1e-3)
b = tp.zero_sample_cdf(1.7, x, v, G1)
print("zero-drift equivalence (I):", np.abs(a - b).max())
st = tp.trace_back(0.0, np.array([2.0]), np.array([0.5]), tp.ZeroDrift())
print("t=0 identity:", st.X[0], st.V[0], st.tau)

# case II zero-sample vs transport G on (0, pi) endpoint region
v2 = np.linspace(0.01, 1.2, 101)
x2 = np.full(v2.shape, 0.95*np.pi)
a2 = tp.approx_cdf(1.0, x2, v2, tp.ZeroDrift(), G2, dt=1e-3)
b2 = tp.zero_sample_cdf(1.0, x2, v2, G2)
print("zero-drift equivalence (II):", np.abs(a2 - b2).max())

# 2. exact drift: approx vs exact CDF, dt-halving
t0 = time.time()
for dt in (4e-3, 2e-3, 1e-3):
    F = tp.approx_cdf(1.0, np.pi, 0.5, tp.ExactDrift("I", p1), G1, dt=dt)
    Fx = sa.exact_cdf(1.0, np.pi, 0.5, "I", p1)
    print(f"exact-drift I t=1 x=pi v=0.5 dt={dt}: |F - F_exact| = {abs(F - Fx):.3e}")
print(f"  [{time.time()-t0:.1f}s]")

# order check via dt halving on a grid
vg = np.linspace(-2, 2, 41)
xg = np.full(vg.shape, np.pi)
Fs = {}
for dt in (4e-3, 2e-3, 1e-3):
    Fs[dt] = tp.approx_cdf(1.0, xg, vg, tp.ExactDrift("I", p1), G1, dt=dt)
d1 = np.abs(Fs[4e-3] - Fs[2e-3]).max(); d2 = np.abs(Fs[2e-3] - Fs[1e-3]).max()
print(f"Euler halving: {d1:.3e} -> {d2:.3e}, observed order {np.log2(d1/d2):.2f}")

# 3. positivity anomaly
fneg = tp.zero_sample_pdf(2.0, np.pi, np.linspace(-3, 3, 601), "I", p1)
fpos = tp.zero_sample_pdf(0.99, np.pi, np.linspace(-3, 3, 601), "I", p1)
print("f_S0 t=2 min:", fneg.min(), " t=0.99 min:", fpos.min())
def zs_cdf(t, x, v): return tp.zero_sample_cdf(t, x, v, G1)
sl, vat = tp.positivity_scan(zs_cdf, 2.0, np.pi, np.linspace(-3, 3, 201))
print("scan zero-sample t=2 x=pi: min slope", sl, "at v =", vat)
def ex_cdf(t, x, v): return sa.exact_cdf(t, np.full(np.shape(v), x), v, "I", p1)
sl2, _ = tp.positivity_scan(ex_cdf, 2.0, np.pi, np.linspace(-3, 3, 201))
print("scan exact t=2 x=pi: min slope", sl2)

# 4. certificate
def grad_G1(x, v):
    return rm.initial_cdf_gradient("I", p1, x, v)
pts = np.array([(x, v) for x in np.linspace(0.1, 2*np.pi - 0.1, 25)
                for v in (-0.5, 0.0, 0.5)])
cert = tp.monotonicity_certificate(grad_G1, 1.0, pts)
print("certificate:", cert)
if not cert.passed:
    x0, v0 = cert.witness; ts = cert.blow_up_time
    xs = x0 + v0 * 1.1 * ts
    sl3, _ = tp.positivity_scan(zs_cdf, 1.1 * ts, xs, np.linspace(v0 - 1.5, v0 + 1.5, 201))
    print(f"scan at 1.1*t*={1.1*ts:.3f}, x={xs:.3f}: min slope {sl3:.4f}")

# 5. estimated drift N=1e4 headline error
ens = rm.draw_samples("I", p1, 10_000, seed=1)
vg = np.linspace(-3, 3, 601)
xg = np.full(vg.shape, np.pi)
t0 = time.time()
F_hat = tp.approx_cdf(1.0, xg, vg, tp.EstimatedDrift(ens, h_v=0.01), G1, dt=1e-3)
el = time.time() - t0
F_ex = sa.exact_cdf(1.0, xg, vg, "I", p1)
err = mt.l2v_error(F_hat, F_ex, vg)
print(f"N=1e4 h=0.01 t=1: L2_v = {err:.3e}  [{el:.0f}s]  target (5e-5, 1e-3)")

# small-N comparison vs empirical
for n in (100, 1000):
    e2 = rm.draw_samples("I", p1, n, seed=2)
    Fh = tp.approx_cdf(1.0, xg, vg, tp.EstimatedDrift(e2, h_v=0.01), G1, dt=1e-3)
    sl_u = es.build_slice(e2, 1.0, np.pi)
    Fe = mt.empirical_cdf(sl_u.u_values, vg)
    print(f"N={n}: approx L2 = {mt.l2v_error(Fh, F_ex, vg):.3e}   empirical L2 = {mt.l2v_error(Fe, F_ex, vg):.3e}")
