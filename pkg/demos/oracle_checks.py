"""Cross-checks of the kernel against the exactly solvable model.

Three independent routes to the same physics: a closed-form single-mode
overlap vs dense evolution in a truncated number basis, a thermal
average vs Monte Carlo over coherent states, and a 2000-mode comb vs
the continuum quadrature kernel.  All three agree to well under the
tolerances used in the tests.
"""

import numpy as np

from simqd import (
    GAAS_DEFAULT,
    ModeDiscretization,
    SingleModeSpec,
    ThermalEnv,
    closed_form_overlap,
    discretized_gamma,
    fock_overlap,
    kernel_complex,
    oracle_report,
    sample_thermal_overlap,
    thermal_average_closed_form,
)

mode = SingleModeSpec(frequency=2e12, coupling=4e11, amplitude=1.2 - 0.7j)
t, t_prime = 3.1e-12, 1.4e-12
a = closed_form_overlap(mode, t, t_prime)
b = fock_overlap(mode, t, t_prime)
print("single mode, coherent state:")
print(f"  closed form {a:.12f}")
print(f"  number basis {b:.12f}  (|diff| = {abs(a - b):.2e})")

env = ThermalEnv(4.0)
want = thermal_average_closed_form(mode, env, t, t_prime)
rng = np.random.default_rng(2)
got = sample_thermal_overlap(mode, env, t, t_prime, 200000, rng)
print("thermal average:")
print(f"  closed form {want:.8f}")
print(f"  Monte Carlo {got:.8f}  (|diff| = {abs(got - want):.2e})")

modes = ModeDiscretization.from_material(GAAS_DEFAULT, n_modes=2000)
print("mode comb vs continuum kernel at 4 K:")
for tau in (0.5e-12, 2e-12, 5e-12):
    comb = complex(discretized_gamma(modes, env, tau))
    cont = kernel_complex(tau, GAAS_DEFAULT, env)
    print(f"  tau = {tau * 1e12:.1f} ps: rel dev {abs(comb - cont) / abs(cont):.2e}")

report = oracle_report(GAAS_DEFAULT, n_samples=50000, n_modes=1000)
print("bundled self-check:", "PASS" if report["all_pass"] else "FAIL")
