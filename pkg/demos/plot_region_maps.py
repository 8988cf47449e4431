"""
Markovian and non-Markovian regions
===================================

Divisibility only asks whether |c_L| ever grows. Scanning that question
over the (r1, r2) plane gives region maps; at phi = 0 and phi = pi the
boundary has a closed form that we overlay.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from bscollision import sweep as sw

OUT = Path(__file__).with_name("output")
OUT.mkdir(exist_ok=True)

r1_axis = sw.Axis("r1", 0, 1, 201)
r2_axis = sw.Axis("r2", 0, 1, 201)
r1 = r1_axis.values

fig, axes = plt.subplots(1, 2, figsize=(10, 4.5))
for ax, phi in zip(axes, (0.0, np.pi)):
    region = sw.scan(r1_axis, r2_axis, {"phi": phi}, L_max=200)
    ax.imshow(region.verdicts.T, origin="lower", extent=(0, 1, 0, 1), cmap="Greys", vmin=0, vmax=2)
    boundary = sw.extract_boundary(region)
    ax.plot(*boundary.points.T, "r.", ms=2, label="extracted")
    if phi == 0.0:
        # The first step where |c_L| can grow is L = 2:
        # c_2 = r1^2 + (1 - r1^2) r2 > r1  <=>  r2 > r1 / (1 + r1).
        ax.plot(r1, r1 / (1 + r1), "c-", label="r2 = r1/(1+r1)")
        ax.plot(r1, 2 * r1 / (1 + r1), "b--", label="r2 = 2r1/(1+r1)")
        x, y = boundary.points.T
        offset = np.abs(y - x / (1 + x)).max()
        print(f"phi=0: max offset from r1/(1+r1) = {offset:.4f} (half cell 0.0025)")
    else:
        # Complex eigenvalues appear above this curve; |c_L| then oscillates.
        ax.plot(r1, [sw.phi_pi_boundary_r2(x) for x in r1], "c-", label="r1 = 2sqrt(r2)/(1+r2)")
        offsets = np.abs(boundary.points[:, 1] - [sw.phi_pi_boundary_r2(x) for x in boundary.points[:, 0]])
        print(f"phi=pi: {int(np.sum(offsets > 0.0025 + 1e-12))} columns more than half a cell off")
    ax.set_title(f"phi = {phi:.3f}")
    ax.set_xlabel("r1")
    ax.set_ylabel("r2")
    ax.legend(loc="upper left", fontsize=7)
fig.tight_layout()
fig.savefig(OUT / "region_maps.png", dpi=120)

# The phi = pi misses come from the horizon: right above the curve the
# oscillation period diverges, so the first revival can come after L = 200.
for L_max in (200, 1000):
    region = sw.scan(r1_axis, r2_axis, {"phi": np.pi}, L_max=L_max)
    pts = sw.extract_boundary(region).points
    off = np.abs(pts[:, 1] - [sw.phi_pi_boundary_r2(x) for x in pts[:, 0]])
    print(f"L_max={L_max}: misses at r1 = {np.round(pts[off > 0.0025 + 1e-12, 0], 3)}")

# In the (phi, r2) plane the map is mirror symmetric about phi = pi, because
# phi -> 2 pi - phi conjugates every c_L.
region = sw.scan(sw.Axis("phi", 0, 2 * np.pi, 121), sw.Axis("r2", 0, 1, 101), {"r1": 0.5}, L_max=200)
print("symmetric about phi = pi:", np.array_equal(region.verdicts, region.verdicts[::-1]))
