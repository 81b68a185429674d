import time
import numpy as np, sys
sys.path.insert(0, "src")
from sclaw import estimator as es
from sclaw import random_models as rm
from sclaw import semi_analytic as sa

p1 = rm.CaseIParams(); p2 = rm.CaseIIParams()
ens1 = rm.draw_samples("I", p1, 2000, seed=7)
ens2 = rm.draw_samples("II", p2, 2000, seed=8)

for ens, label, t, x in [(ens1, "I", 1.0, np.pi), (ens2, "II", 1.0, 2.0)]:
    sl = es.build_slice(ens, t, x)
    est = es.ConditionalEstimator(slice=sl, h_v=0.05)
    vv = np.linspace(-2, 2, 41) if label == "I" else np.linspace(0.01, 1.2, 41)
    bad = 0
    for v in vv:
        a, b = es.estimate_m(est, v), es.brute_force_m(est, v)
        if a != b: bad += 1
    print(f"{label}: fast vs brute bitwise mismatches: {bad}/41")
    # h -> inf covers everything
    big = es.ConditionalEstimator(slice=sl, h_v=1e9)
    ref = 0.1 * float(np.mean(sl._uxx_sorted))
    print(f"{label}: h=inf equals eps*mean(uxx): {es.estimate_m(big, 0.3) == ref}")

# monotone engine vs slice estimator (same window, means should agree ~1e-13)
eng = es.MonotoneWindowEngine(ens1)
sl = es.build_slice(ens1, 1.0, np.pi)
est = es.ConditionalEstimator(slice=sl, h_v=0.05)
vg = np.linspace(-1.5, 1.5, 201)
t0 = time.time()
m_eng, c_eng = eng.query(1.0, np.full(vg.shape, np.pi), vg, 0.05)
t_eng = time.time() - t0
m_sl, c_sl = es.sweep(est, vg)
print("I monotone vs slice: max|dm| =", np.abs(m_eng - m_sl).max(),
      " count mismatches:", int((c_eng != c_sl).sum()), f" engine {t_eng*1e3:.1f}ms")

eng2 = es.MonotoneWindowEngine(ens2)
sl2 = es.build_slice(ens2, 1.0, 2.0)
est2 = es.ConditionalEstimator(slice=sl2, h_v=0.05)
vg2 = np.linspace(0.01, 1.2, 201)
m_eng2, c_eng2 = eng2.query(1.0, np.full(vg2.shape, 2.0), vg2, 0.05)
m_sl2, c_sl2 = es.sweep(est2, vg2)
print("II monotone vs slice: max|dm| =", np.abs(m_eng2 - m_sl2).max(),
      " count mismatches:", int((c_eng2 != c_sl2).sum()))

# case II mirror side (x in (pi, 2pi)) vs direct slice there
sl3 = es.build_slice(ens2, 1.0, 4.5)
est3 = es.ConditionalEstimator(slice=sl3, h_v=0.05)
vg3 = np.linspace(-1.2, -0.01, 101)
m_eng3, c_eng3 = eng2.query(1.0, np.full(vg3.shape, 4.5), vg3, 0.05)
m_sl3, c_sl3 = es.sweep(est3, vg3)
print("II mirror side: max|dm| =", np.abs(m_eng3 - m_sl3).max(),
      " count mismatches:", int((c_eng3 != c_sl3).sum()))

# big-N timing: N=1e4 case I, 601 queries
ens_big = rm.draw_samples("I", p1, 10_000, seed=11)
eng_b = es.MonotoneWindowEngine(ens_big)
vb = np.linspace(-3, 3, 601)
t0 = time.time()
for rep in range(10):
    m, c = eng_b.query(1.0, np.full(vb.shape, np.pi), vb, 0.01)
print(f"N=1e4 601-query monotone: {(time.time()-t0)/10*1e3:.1f} ms/node, mean count {c.mean():.1f}")

# estimator accuracy vs exact m
mx = sa.exact_m(1.0, np.full(vb.shape, np.pi), vb, "I", p1)
print("N=1e4 h=0.01: max|m_hat - m| on [-3,3] =", np.abs(m - mx).max(),
      " rms =", float(np.sqrt(np.mean((m - mx)**2))))
