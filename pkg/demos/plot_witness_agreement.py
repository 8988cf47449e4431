"""
Fidelity, relative entropy and concurrence
==========================================

Two squeezed vacua are sent through the channel. A divisible process can
only make them harder to tell apart, so a drop in fidelity or a rise in
relative entropy flags non-Markovianity. At zero temperature the
single-photon picture gives a third view: the concurrence of the Choi state.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from bscollision import ChannelParams, concurrence_witness
from bscollision import sweep as sw

OUT = Path(__file__).with_name("output")
OUT.mkdir(exist_ok=True)

temps = sw.Axis("n_T", 0, 5, 26)
r2 = sw.Axis("r2", 0, 1, 26)
fig, axes = plt.subplots(3, 4, figsize=(12, 8), sharex=True, sharey=True)
for col, r1 in enumerate((0.0, 0.3, 0.6, 0.9)):
    maps = {kind: sw.scan(temps, r2, {"r1": r1}, kind, 200).verdicts
            for kind in ("divisibility", "fidelity", "relative_entropy")}
    keep = maps["divisibility"] != 2
    agree = all(np.array_equal(maps[k][keep], maps["divisibility"][keep]) for k in maps)
    print(f"r1={r1}: witnesses agree on all non-singular cells: {agree}")
    for row, (kind, grid) in enumerate(maps.items()):
        axes[row, col].imshow(grid.T, origin="lower", extent=(0, 5, 0, 1), aspect="auto",
                              cmap="Greys", vmin=0, vmax=2)
        axes[row, col].set_title(f"{kind}, r1={r1}", fontsize=8)
fig.supxlabel("n_T")
fig.supylabel("r2")
fig.tight_layout()
fig.savefig(OUT / "witness_agreement.png", dpi=120)

# r1 = 0: the system talks only to the memory, and any r2 > 0 gives a
# revival. The divisibility test calls those cells singular because c_1 = 0.

# Concurrence along L for r1 = 0.5, r2 = 0.4 at three phases.
fig, ax = plt.subplots(figsize=(5, 3.5))
for phi, name in ((0.0, "0"), (np.pi / 2, "pi/2"), (np.pi, "pi")):
    s = concurrence_witness(ChannelParams(0.5, 0.4, phi), 60)
    ax.semilogy(np.maximum(s.values, 1e-18), label=f"phi={name}: {s.verdict.value}")
ax.set_xlabel("L")
ax.set_ylabel("concurrence")
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "concurrence.png", dpi=120)
