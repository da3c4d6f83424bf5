"""Tabulate the phonon dephasing exponent gamma(t) at three temperatures.

Shows the real part climbing to its temperature-dependent plateau while
the imaginary part (line shift) is the same curve at every temperature.
Also prints the falling-edge cutoff of the spectral weight.

Needs matplotlib for the figure; the numbers print either way.
"""

from pathlib import Path

import numpy as np

from simqd import (
    GAAS_DEFAULT,
    ThermalEnv,
    cutoff_frequency,
    plateau_real,
    polaron_shift_rate,
    tabulate_kernel,
)

temperatures = [0.4, 4.0, 40.0]
tables = {T: tabulate_kernel(GAAS_DEFAULT, ThermalEnv(T), t_max=2e-11) for T in temperatures}

print("polaron shift rate:", f"{polaron_shift_rate(GAAS_DEFAULT):.4e} rad/s")
print(f"{'T [K]':>6} {'plateau Re':>12} {'cutoff [rad/s]':>15}")
for T, kern in tables.items():
    cut = cutoff_frequency(GAAS_DEFAULT, ThermalEnv(T))
    print(f"{T:>6} {kern.plateau_re:>12.4f} {cut:>15.3e}")

# the imaginary part carries no thermal factor at all
im_dev = np.max(np.abs(tables[0.4].values.imag - tables[40.0].values.imag))
print("Im spread across temperatures:", f"{im_dev:.2e}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    raise SystemExit("no matplotlib, skipping the figure")

fig, (ax_re, ax_im) = plt.subplots(1, 2, figsize=(9, 3.5), constrained_layout=True)
for T, kern in tables.items():
    t_ps = kern.times * 1e12
    ax_re.plot(t_ps, kern.values.real, label=f"{T} K")
    ax_im.plot(t_ps, kern.values.imag, label=f"{T} K")
    ax_re.axhline(plateau_real(GAAS_DEFAULT, ThermalEnv(T)), ls=":", lw=0.8, color="gray")
ax_re.set_xlabel("t [ps]")
ax_re.set_ylabel("Re gamma")
ax_re.legend()
ax_im.set_xlabel("t [ps]")
ax_im.set_ylabel("Im gamma")

out = Path(__file__).with_suffix(".png")
fig.savefig(out, dpi=150)
print("figure:", out)
