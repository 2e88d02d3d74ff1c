"""Walk through one iteration of each solver variant on a tiny problem.

The problem is min 0.5 x^2 + 0.5 y^2 subject to x = y, whose unique saddle
point is the origin. Starting from (y, lam) = (1, 0) we can follow every
quantity by hand: the x-solve gives 0.5, the y-solve 0.25, and the two
multiplier updates -0.25 and 0.5.
"""

import numpy as np

from admmkit import (
    EssentialState,
    SolverConfig,
    criterion_value,
    predict,
    relax,
    run,
)
from admmkit.quadratic import scalar_chain

problem = scalar_chain()
v0 = EssentialState(np.array([1.0]), np.array([0.0]))

# one prediction sweep: x-solve, y-solve, both multiplier updates
pred = predict(problem, v0, beta=1.0)
print("prediction from (y, lam) = (1, 0):")
print(f"  x_next    = {pred.x_next[0]: .4f}")
print(f"  y_pred    = {pred.y_pred[0]: .4f}")
print(f"  lam_pred  = {pred.lam_pred[0]: .4f}   (multiplier from the updated y)")
print(f"  lam_early = {pred.lam_early[0]: .4f}   (multiplier from the old y)")

# the relaxation gate: extrapolate only when this inner product is >= 0
crit = criterion_value(pred, v0, problem)
print(f"\nrelaxation criterion value = {crit:.4f}"
      f" -> {'extrapolate' if crit >= 0 else 'take the plain step'}")

# what the extrapolated point would look like anyway
forced = relax(v0, pred, gamma=1.5)
print(f"forced extrapolation with gamma=1.5: y = {forced.y[0]:.4f}, lam = {forced.lam[0]:.4f}")

# full solves with each variant
print("\nfull solves to (1e-10, 1e-8) tolerances from (1, 0):")
for variant in ("classical", "over_relaxed", "relaxed_customized"):
    config = SolverConfig(
        variant=variant, gamma=1.5, eps_abs=1e-10, eps_rel=1e-8, max_iter=500
    )
    result = run(problem, config, v0)
    print(f"  {variant:<20} {result.iterations:3d} iterations, "
          f"final y = {result.final.y[0]: .2e}, lam = {result.final.lam[0]: .2e}")
