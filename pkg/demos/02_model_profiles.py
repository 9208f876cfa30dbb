"""
Model warping functions h0 and f_C
==================================

Solve the two model ODEs, print a few samples and the property report,
and write a CSV table ready for plotting.
"""

import io

import numpy as np

from surgerybench.profiles import profile_header, scale_profiles, solve_fc, solve_h0
from surgerybench.profiles import verify_profile_properties
from surgerybench.warp_core import write_profile_csv

h0 = solve_h0(0.5, 50.0)
fc = solve_fc(0.5, h0)
print("h0(0) =", h0.initial_value)

t = np.array([0.0, 1.0, 5.0, 20.0, 50.0])
f, df, _ = fc.jet(t)
print(" t      h0        f_C       f_C'      f_C h0'")
for row in zip(t, h0.value(t), f, df, f * np.exp(-0.5 * h0.value(t) ** 2)):
    print(" ".join(f"{x:9.4f}" for x in row))

# decay is slow in t: expect the decay entry to fail at t_max = 50
for chk in verify_profile_properties(h0, fc).entries:
    print(f"{chk.name:11s} {'ok' if chk.passed else 'FAIL'}  {chk.detail}")

buf = io.StringIO()
write_profile_csv(buf, scale_profiles(h0, fc, 1.0, 1.0), 3, 3, np.linspace(0, 50, 6),
                  header=profile_header(h0, fc))
print(buf.getvalue())
