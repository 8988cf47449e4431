"""
Entanglement revivals and the threshold temperature
===================================================

Half of a two-mode squeezed vacuum goes through the channel. Without
thermal noise the entanglement revives exactly where divisibility fails.
Above n_c = r1^2 / (1 - r1^2) the first step already kills the
entanglement and the witness needs a stronger memory before it sees a
revival.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from bscollision import sweep as sw
from bscollision import threshold_temperature

OUT = Path(__file__).with_name("output")
OUT.mkdir(exist_ok=True)

fig, ax = plt.subplots(figsize=(5.5, 4))
for r1 in (0.5, 0.7, 0.9):
    n_c = threshold_temperature(r1)
    temps = np.linspace(0, 3 * n_c, 31)
    edge = [sw.bisect_boundary("entanglement", {"r1": r1, "n_T": n}, xtol=1e-6) for n in temps]
    flat = sw.second_step_boundary(r1)
    ax.plot(temps / n_c, edge, "o-", ms=3, label=f"r1={r1}")
    ax.axhline(flat, color="grey", lw=0.5)
    # How far the witness boundary sits above the divisibility boundary.
    gap = np.array(edge) - flat
    print(f"r1={r1}: n_c={n_c:.4f}; gap at n_T = 1.5 n_c, 2 n_c, 3 n_c:",
          np.round(gap[[15, 20, 30]], 4))
ax.set_xlabel("n_T / n_c")
ax.set_ylabel("smallest r2 with an entanglement revival")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "entanglement_threshold.png", dpi=120)

# Above threshold the revival first shows up at L = 2, where
# |c_2|^2 = n_T / (n_T + 1) marks the onset. That gives the rising branch
# in closed form, r2 = (sqrt(n/(n+1)) - r1^2) / (1 - r1^2).
r1, n = 0.5, 1.0
predicted = (np.sqrt(n / (n + 1)) - r1**2) / (1 - r1**2)
print("r1=0.5, n_T=1: predicted", round(predicted, 6),
      "measured", round(sw.bisect_boundary("entanglement", {"r1": r1, "n_T": n}, xtol=1e-8), 6))
