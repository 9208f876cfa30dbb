"""
Ricci curvature of a round sphere written as a join
===================================================

With h = cos t and f = sin t the doubly warped product is the unit sphere,
so every Ricci component equals p + q - 2.
"""

import numpy as np

from surgerybench.warp_core import min_ricci_on_grid, ricci_components, round_join_profiles

p, q = 3, 4
pair = round_join_profiles(p, q, 1.4)
t = np.linspace(pair.start, pair.end, 7)

# every row should read 5.0
for name, values in zip(("tt", "vv", "ww"), ricci_components(pair, p, q, t)):
    print(f"Ric_{name}:", np.round(values, 12))

best = min_ricci_on_grid(pair, p, q, t)
print("grid minimum", best)
