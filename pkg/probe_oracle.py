"""Dev probe: series vs FD oracle accuracy and runtime."""
import sys
import time

sys.path.insert(0, "src")
import numpy as np
from sclaw import burgers_exact as bx

t0 = time.time()
for case, xi in [("I", 0.0), ("II", 0.3), ("II", 0.8)]:
    sol = bx.build_solution(case, 0.1, xi=xi)
    print(f"case {case} xi={xi}: k_max={sol.k_max} A0={sol.a_coeffs[0]:.6e} "
          f"tail={(abs(sol.a_coeffs[-1])+abs(sol.b_coeffs[-1]))/sol.a_coeffs[0]:.2e}")
    for t_end in (0.5, 1.0, 2.0):
        ts = time.time()
        x, u_fd = bx.fd_oracle(case, 0.1, xi, t_end)
        u_series = sol.u_eval(t_end, x)
        err = np.max(np.abs(u_series - u_fd))
        print(f"  t={t_end}: maxdiff={err:.3e}  fd_time={time.time()-ts:.2f}s")
print(f"total {time.time()-t0:.1f}s")
