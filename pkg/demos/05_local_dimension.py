"""Local dimension from ball masses against the entropy/exponent formula.

For a Bernoulli measure on the ternary horseshoe the local dimension at a
typical point is entropy over unstable exponent plus entropy over the
absolute stable exponent.  We estimate it from ball masses on both slices
and compare.
"""

import numpy as np

from bowendim.dimension import young_formula_check
from bowendim.gibbs import markov_measure
from bowendim.modelfile import load_demo

lm = load_demo("ternary")
for weight in (0.5, 0.3, 0.1):
    Q = np.tile([weight, 1 - weight], (2, 1))
    mu = markov_measure(lm.model.subshift, Q)
    check = young_formula_check(lm.realization, mu, count=128)
    print(f"p = {weight:.1f}: ball masses {check.empirical:.4f}, formula {check.target:.4f}, "
          f"point spread {check.slopes.std():.3f}")
