import time
import numpy as np, sys
sys.path.insert(0, "src")
from sclaw import estimator as es
from sclaw import random_models as rm
from sclaw import semi_analytic as sa
from sclaw import metrics as mt

p1 = rm.CaseIParams()
t_, x_ = 1.0, np.pi
vr = (-1.5, 1.5)
vg = np.linspace(*vr, 512)
exact = sa.exact_m(t_, np.full(vg.shape, x_), vg, "I", p1)
def exact_fn(v): return exact

C = 0.063
t0 = time.time()
mises = []
for n in (10**3, 10**4, 10**5):
    h = es.bandwidth_rule(n, C)
    def builder(seed, n=n, h=h):
        ens = rm.draw_samples("I", p1, n, seed=seed)
        return es.ConditionalEstimator(slice=es.build_slice(ens, t_, x_), h_v=h)
    val = es.mise(builder, exact_fn, vr, n_repeats=20, seed=100)
    mises.append(val)
    print(f"N={n}: h={h:.4f} MISE={val:.4e}")
slope, _, r2 = mt.rate_fit([1e3, 1e4, 1e5], mises)
print(f"MISE slope = {slope:.3f} (r2={r2:.3f})  target [-1.0, -0.6]   [{time.time()-t0:.0f}s]")

# monotone MISE in N property (N in {1e2,1e3,1e4}, fixed h=0.01? no: rule h)
vals = []
for n in (10**2, 10**3, 10**4):
    h = es.bandwidth_rule(n, C)
    def builder(seed, n=n, h=h):
        ens = rm.draw_samples("I", p1, n, seed=seed)
        return es.ConditionalEstimator(slice=es.build_slice(ens, t_, x_), h_v=h)
    vals.append(es.mise(builder, exact_fn, vr, n_repeats=20, seed=100))
print("MISE monotone over {1e2,1e3,1e4}:", [f"{v:.3e}" for v in vals])

# bandwidth study: error of m-hat (L2 over grid) across h at N=1e4 and N=1e2
t0 = time.time()
for n in (10**4, 10**2):
    errs = []
    hs = [0.005, 0.00707, 0.01, 0.0141, 0.02, 0.0283, 0.05]
    for h in hs:
        # 5-repeat mean L2 of m-hat
        tot = 0.0
        for r in range(5):
            ens = rm.draw_samples("I", p1, n, seed=300 + r)
            est = es.ConditionalEstimator(slice=es.build_slice(ens, t_, x_), h_v=h)
            m_hat, _ = es.sweep(est, vg)
            tot += mt.l2v_error(m_hat, exact, vg)
        errs.append(tot / 5)
    print(f"N={n}: " + "  ".join(f"h={h:.4g}:{e:.3e}" for h, e in zip(hs, errs)))
    print(f"   max/min ratio = {max(errs)/min(errs):.2f}" )
print(f"[{time.time()-t0:.0f}s]")
