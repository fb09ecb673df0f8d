"""Searching for bent functions with tree GP.

Builds a small genome by hand, scores it, then races the four mutation
operators at n=8 (the full comparison uses n=12 and 100 runs each).
"""
import numpy as np

from evobench.bent.genome import eval_genome, fitness, from_expr, node_nonlinearities
from evobench.bent.search import BentParams, bent_experiment
from evobench.bent.walsh import bent_bound

# x0 x1 ^ x2 x3 is the classic 4-variable bent function
g = from_expr(4, 2, ("xor", ("and", 0, 1), ("and", 2, 3)))
print(g)
print("truth table", eval_genome(g))
print("nl", fitness(g), "bound", bent_bound(4))
print("per node nl", node_nonlinearities(g))

rep = bent_experiment(BentParams(n=8, budget=20000), 20, master_seed=5)
for op, s in rep.summaries.items():
    print(f"{op:>8}: median {s.median:7.1f}  q1 {s.q1:7.1f}  q3 {s.q3:7.1f}")
for r in rep.pairs:
    q = r.payload
    print(f"{q['operator_a']} vs {q['operator_b']}: p={q['p']:.3g}")
ok = np.mean([r.payload["success"] for r in rep.records])
print(f"success rate {100 * ok:.0f}%")
