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
hs = [0.1, 0.2, 0.4, 0.8]
t0 = time.time()
reps = 20
for h in hs:
    tot = 0.0
    for r in range(reps):
        e2 = rm.draw_samples("I", p1, 100, seed=500 + r)
        F = tp.approx_cdf(1.0, xg, vg, tp.EstimatedDrift(e2, h_v=h), G1, dt=1e-3)
        tot += mt.l2v_error(F, F_ex, vg) / reps
    print(f"N=1e2 h={h}: {tot:.3e}")
print(f"[{time.time()-t0:.0f}s]")
