import time
import numpy as np, sys
sys.path.insert(0, "src")
from sclaw import transport_solver as tp
from sclaw import semi_analytic as sa
from sclaw import random_models as rm
from sclaw import metrics as mt

p1 = rm.CaseIParams()
G1 = tp.transport_G("I", p1)
vg = np.linspace(-3, 3, 201)
xg = np.full(vg.shape, np.pi)
F_ex = sa.exact_cdf(1.0, xg, vg, "I", p1)
hs = [0.005, 0.01, 0.02, 0.05]

t0 = time.time()
ens = rm.draw_samples("I", p1, 10_000, seed=1)
errs4 = []
for h in hs:
    F = tp.approx_cdf(1.0, xg, vg, tp.EstimatedDrift(ens, h_v=h), G1, dt=1e-3)
    errs4.append(mt.l2v_error(F, F_ex, vg))
print("N=1e4:", "  ".join(f"h={h}:{e:.3e}" for h, e in zip(hs, errs4)),
      f" ratio={max(errs4)/min(errs4):.2f}  [{time.time()-t0:.0f}s]")

t0 = time.time()
reps = 20
errs2 = {h: 0.0 for h in hs}
for r in range(reps):
    e2 = rm.draw_samples("I", p1, 100, seed=500 + r)
    for h in hs:
        F = tp.approx_cdf(1.0, xg, vg, tp.EstimatedDrift(e2, h_v=h), G1, dt=1e-3)
        errs2[h] += mt.l2v_error(F, F_ex, vg) / reps
print("N=1e2 20-rep:", "  ".join(f"h={h}:{errs2[h]:.3e}" for h in hs),
      f" [{time.time()-t0:.0f}s]")
