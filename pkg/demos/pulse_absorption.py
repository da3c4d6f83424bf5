"""Coherence decay of the emitter after a short (1 ps) one-photon pulse.

At 40 K the phonon kernel kills the optical coherence within a few ps
while the kernel-off reference barely moves; cooling to 0.4 K recovers
most of the reference curve.  This is the qualitative picture behind
the temperature ordering of the transfer efficiencies.
"""

from pathlib import Path

import numpy as np

from simqd import (
    GAAS_DEFAULT,
    CouplingRates,
    PulseSpec,
    SimGrid,
    ThermalEnv,
    tabulate_kernel,
    transversal,
)

pulse = PulseSpec(duration=1e-12)
rates = CouplingRates(gamma_cavity=1e9, gamma_background=1e9)
grid = SimGrid.for_scenario(pulse, rates)
t = grid.times()

curves = {}
for T in (0.4, 4.0, 40.0):
    kern = tabulate_kernel(GAAS_DEFAULT, ThermalEnv(T), t_max=2e-11)
    curves[f"{T} K"] = np.abs(transversal(pulse, rates, kern, grid))
curves["no dephasing"] = np.abs(transversal(pulse, rates, None, grid))

print(f"{'curve':>14} {'peak |S|':>10} {'drop over 5 ps':>16}")
for name, mag in curves.items():
    i = int(np.argmax(mag))
    j = int(np.searchsorted(t, t[i] + 5e-12))
    print(f"{name:>14} {mag[i]:>10.4f} {mag[i] / mag[j]:>15.3f}x")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    raise SystemExit("no matplotlib, skipping the figure")

fig, ax = plt.subplots(figsize=(6, 4), constrained_layout=True)
for name, mag in curves.items():
    style = {"ls": "--", "color": "gray"} if name == "no dephasing" else {}
    ax.plot(t * 1e12, mag, label=name, **style)
ax.set_xlabel("t [ps]")
ax.set_ylabel("|transversal component|")
ax.set_xlim(-4, 20)
ax.legend()

out = Path(__file__).with_suffix(".png")
fig.savefig(out, dpi=150)
print("figure:", out)
