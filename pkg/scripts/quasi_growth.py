"""Partial sums of sum log omega(-n-1)/(n+1)^2 beside the log-integral of the
outer-function recipe, for a quasianalytic and a non-quasianalytic family."""

import numpy as np

from quasilab import halfplane as H
from quasilab import weights as W

L_MAX = 4096.0
k = np.arange(1, 513)
families = {
    "shifted-geometric a=1/2": W.shifted_geometric(0.5, 64, 1.0),
    "a_k ~ 1/k^2, v_k = 1/k": W.explicit(6 / np.pi**2 / k**2, 1.0 / k, 1.0),
}
for name, fam in families.items():
    omega = W.build_weight(fam, int(L_MAX) + 2)
    step = W.StepWeight.from_weight(omega)
    sums = W.quasi_partial_sums(omega)
    rep = H.outer_recipe_check(lambda t: step.log_cell(np.floor(t).astype(int)), L_MAX)
    print(name)
    print(f"  {'N':>6} {'partial sum':>12}")
    for n in 2 ** np.arange(3, 13):
        print(f"  {n:6d} {sums[n - 1]:12.6f}")
    print(f"  log-integral ladder: {np.round(rep.details['log_integrals'], 4).tolist()}")
    print(f"  log-integral converging: {rep.passed}")
