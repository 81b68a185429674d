import numpy as np, sys
sys.path.insert(0, "src")
from sclaw import burgers_exact as bx
from sclaw import random_models as rm

p2 = rm.CaseIIParams()
t, x = 0.5, 2.0
# scan: for each v near x/t, bisect manually and report final residual
cap = float(rm.xi_quantile("II", p2, 1 - 1e-15))
print("xi cap =", cap)
for v in [3.0, 3.5, 3.8, 3.9, 3.95, 3.99]:
    lo, hi = 0.0, cap
    tab_hi = bx.build_table("II", 0.1, np.array([hi]))
    u_hi = tab_hi.velocities(t, np.array([x]))[0][0]
    if u_hi < v:
        print(f"v={v}: saturated (u_hi={u_hi:.6f})")
        continue
    for i in range(200):
        mid = 0.5 * (lo + hi)
        tab = bx.build_table("II", 0.1, np.array([mid]))
        um = tab.velocities(t, np.array([x]))[0][0]
        if um < v: lo = mid
        else: hi = mid
        if hi - lo < 1e-15 * max(1.0, hi):
            break
    print(f"v={v}: iters={i+1} xi*={mid:.10f} resid={abs(um - v):.3e} width={hi-lo:.3e}")
