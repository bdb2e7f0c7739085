"""How rotation makes the level-N roots climb.

On a cocycle model the unstable maps mix directions, so the norm of a long
product is smaller than the product of norms.  Pressure at level N (taken per
step) drops, and the root moves up with N.
"""

from bowendim.bowen import bowen_root_unstable
from bowendim.modelfile import load_demo

model = load_demo("rotation-cocycle").model
previous = None
for level in (1, 2, 4, 8, 16):
    r = bowen_root_unstable(model, level).root
    step = "" if previous is None else f"  (+{r - previous:.4f})"
    print(f"level {level:>2}: root {r:.6f}{step}")
    previous = r
