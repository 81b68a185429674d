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
for C in (1.2, 1.6, 2.0):
    mises = []
    for n in (10**3, 10**4, 10**5):
        h = es.bandwidth_rule(n, C)
        def builder(seed, n=n, h=h):
            ens = rm.draw_samples("I", p1, n, seed=seed)
            return es.ConditionalEstimator(slice=es.build_slice(ens, t_, x_), h_v=h)
        mises.append(es.mise(builder, exact_fn, vr, n_repeats=20, seed=100))
    slope, _, r2 = mt.rate_fit([1e3, 1e4, 1e5], mises)
    print(f"C={C}: MISE={['%.3e' % m for m in mises]} slope={slope:.3f} r2={r2:.3f}")
