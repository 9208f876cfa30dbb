"""
A certified neck
================

Find the surgery constant kappa for one input, then rerun with
rho/N = kappa/2 so that the gluing checks are populated too.
"""

from surgerybench.neck_solver import SurgeryInput, solve_neck

# R/N close to pi/2 keeps the slope target reachable on a short interval
inp = SurgeryInput(p=3, q=3, ratio_RN=1.5, lam=0.5, r=1.0)
first = solve_neck(inp)
print(f"kappa = {first.kappa:.8f}")

cert = solve_neck(SurgeryInput(3, 3, 1.5, 0.5, 1.0, rho_over_N=first.kappa / 2))
print(f"a = {cert.a}, b = {cert.b:.6f}, C = {cert.C}")
print(f"t1 = {cert.t1:.4f}, t0 = {cert.t0:.4f}, smoothing delta = {cert.delta:.3g}")
print(f"min Ricci margin {cert.min_ricci_margin:.3e} ({cert.min_ricci_component} "
      f"at t = {cert.min_ricci_at:.4f}) on {cert.grid_points} points")
for chk in cert.boundary_report:
    print(f"  {chk.name:40s} {chk.relation:2s} residual {chk.residual:.1e}  "
          f"{'ok' if chk.passed else 'FAIL'}")
print("certificate passed:", cert.passed)
