"""How often is an optimal assignment already a single tour?

Solves random cost matrices and reads each optimal permutation as a set of
subtours.  Desk scale: n=60, 200 matrices per value range.
"""
import numpy as np

from evobench.assignment import ap_atsp_ensemble, cycle_decompose, gen_cost_matrix, hungarian_solve
from evobench.harness import make_rng

rng = make_rng(7)
m = gen_cost_matrix(8, 100, rng)
sol = hungarian_solve(m)
print("8x8 matrix, optimal cost", sol.cost)
print("assignment", list(sol.assignment))
print("subtour lengths", cycle_decompose(sol.assignment))

records = ap_atsp_ensemble(60, [20, 1000, 10**6], 200, master_seed=1)
for r in records:
    q = r.payload
    print(f"rand_max={q['rand_max']:>8}  tours {100 * q['tour_fraction']:5.2f}%  "
          f"mean subtours {q['mean_subtours']:.2f}  max {q['max_subtours']}")

# a random permutation is one n-cycle with probability 1/n; compare
print("1/n reference:", f"{100 / 60:.2f}%")
print("harmonic number H_60 (mean cycles of a random permutation):", round(float(np.sum(1 / np.arange(1, 61))), 3))
