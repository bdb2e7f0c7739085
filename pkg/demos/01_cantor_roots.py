"""Roots of the pressure equation on the middle-thirds horseshoe.

The ternary model expands by 3 on two branches, so the unstable slice is the
middle-thirds Cantor set.  We solve the pressure equation, compare the root
with log 2 / log 3 and with a box count, then watch the root stay put as the
level grows (the model is conformal, so every level agrees).
"""

import numpy as np

from bowendim.bowen import bowen_root_stable, bowen_root_unstable, root_sequence
from bowendim.dimension import box_counting
from bowendim.modelfile import load_demo

lm = load_demo("ternary")
model = lm.model

root = bowen_root_unstable(model)
print(f"unstable root      {root.root:.12f}  ({root.iterations} bisection steps, {root.status})")
print(f"log 2 / log 3      {np.log(2) / np.log(3):.12f}")

for depth in (6, 8, 10):
    est = box_counting(lm.realization, "unstable", depth).estimate
    print(f"box count depth {depth:>2} {est:.4f}")

print(f"stable root        {bowen_root_stable(model).root:.12f}")
print("roots by level     ", np.round(root_sequence(model, "psi", 3).roots, 12))
