"""Equilibrium states, their Gibbs constants and the variational principle.

For each bundled model we take the measure that maximises entropy plus the
integral of the unstable-Jacobian potential, then check three things:
the Gibbs ratio of cylinder masses stays bounded, the measure attains the
pressure, and nearby measures fall short of it.
"""

import numpy as np

from bowendim.gibbs import (entropy, equilibrium_measure, gibbs_certificate, perturbed_measure,
                            variational_gap)
from bowendim.modelfile import demo_names, load_demo
from bowendim.potentials import LocallyConstantPotential, psi_values
from bowendim.pressure import pressure_exact
from bowendim.symbolic import word_array

rng = np.random.default_rng(1)
print(f"{'model':<18}{'pressure':>10}{'entropy':>10}{'gap':>10}{'drift':>10}{'worst rival':>13}")
for name in demo_names():
    model = load_demo(name).model
    S = model.subshift
    words = word_array(S, 1)
    pot = LocallyConstantPotential(S, 1, -psi_values(model, words, model.unstable_dim))
    mu = equilibrium_measure(S, pot)
    P = pressure_exact(S, pot)
    cert = gibbs_certificate(mu, pot, P)
    rival = min(variational_gap(perturbed_measure(mu, rng), pot, P) for _ in range(5))
    print(f"{name:<18}{P:>10.4f}{entropy(mu):>10.4f}{variational_gap(mu, pot, P):>10.1e}"
          f"{cert.drift:>10.1e}{rival:>13.2e}")
