import time
import numpy as np
import sys
sys.path.insert(0, "src")
from sclaw import semi_analytic as sa
from sclaw import random_models as rm
from sclaw import burgers_exact as bx

p1 = rm.CaseIParams()
p2 = rm.CaseIIParams()

# --- t = 0 identities ---------------------------------------------------
# case I: u(0,x,xi) = sin x + xi  =>  F(0,x,v) = Phi((v - sin x)/sigma)
from scipy.special import ndtr
for x, v in [(0.3, 0.7), (np.pi, -0.2), (5.0, 1.4)]:
    F = sa.exact_cdf(0.0, x, v, "I", p1)
    ref = ndtr((v - np.sin(x)) / 0.5)
    print(f"I  t=0 x={x:.2f} v={v:+.2f}  F={F:.12f} ref={ref:.12f} d={abs(F-ref):.2e}")
# case II: F(0,x,v) = GammaCDF(v / sin x) on (0, pi)
from scipy.special import gammainc
for x, v in [(0.5, 0.3), (2.0, 0.9), (np.pi/2, 0.01)]:
    F = sa.exact_cdf(0.0, x, v, "II", p2)
    ref = gammainc(2.8, (v / np.sin(x)) / 0.18)
    print(f"II t=0 x={x:.2f} v={v:+.2f}  F={F:.12f} ref={ref:.12f} d={abs(F-ref):.2e}")

# case II m(0, x, v) = -eps*v
for x, v in [(0.5, 0.3), (2.5, 0.9), (1.2, 0.05)]:
    m = sa.exact_m(0.0, x, v, "II", p2)
    print(f"II m(0,{x:.2f},{v:.2f}) = {m:.12f}  ref={-0.1*v:.12f}  d={abs(m+0.1*v):.2e}")

# --- inversion residual check at t > 0 ----------------------------------
sol0 = bx.build_solution("I", 0.1)
for t, x, v in [(1.0, 2.0, 0.4), (2.0, np.pi, 0.0), (0.5, 4.0, -0.9)]:
    xi = sa.inverse_map(t, x, v, "I", p1)
    u, _, _ = bx.shifted_eval(sol0, t, np.array([x]), xi)
    print(f"I  t={t} x={x:.2f} v={v:+.2f}  xi*={xi:+.6f}  resid={abs(u[0]-v):.2e}")
for t, x, v in [(1.0, 2.0, 0.4), (2.0, 1.5, 0.3), (0.5, 0.8, 0.2)]:
    r = sa.inverse_map(t, x, v, "II", p2)
    tab = bx.build_table("II", 0.1, np.array([r]))
    u, _, _ = tab.velocities(t, np.array([x]))
    print(f"II t={t} x={x:.2f} v={v:+.2f}  xi*={r:+.6f}  resid={abs(u[0]-v):.2e}")

# out-of-range statuses
print("II v=-0.1  ->", sa.inverse_map(1.0, 2.0, -0.1, "II", p2))
print("II v=x/t   ->", sa.inverse_map(1.0, 2.0, 2.0, "II", p2))
print("II v huge  ->", sa.inverse_map(1.0, 2.0, 1.999999, "II", p2))
