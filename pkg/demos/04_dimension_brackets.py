"""Bracketing the dimension of a natural measure with typical-block horseshoes.

Blocks whose entropy and exponents are close to those of the measure are
glued into a subsystem; its roots give lower and upper bounds.  We follow the
bracket as the block length grows and the slack shrinks, and compare it with
the value predicted from entropy and exponents.
"""

from bowendim.dimension import measure_dimension_experiment
from bowendim.modelfile import load_demo

for name in ("ternary", "srb-mixed"):
    model = load_demo(name).model
    rep = measure_dimension_experiment(model, n_grid=(8, 10, 12), eps_grid=(0.1, 0.05))
    print(f"{name}: target {rep.target:.4f} "
          f"(unstable {rep.dim_unstable:.4f} + stable {rep.dim_stable:.4f})")
    for row in rep.rows:
        mark = "contains" if row.contains(rep.target) else "misses"
        print(f"  eps {row.eps:<5} n {row.level:>2}  [{row.lower:.4f}, {row.upper:.4f}]"
              f"  width {row.width:.3f}  {mark}  retained {row.extra['retained']:.3f}")
