"""A generational GA fed partly inverted fitness values.

Small sweep over the corruption probability p for OneMax and LeadingOnes;
prints the mean best true fitness and the relative effort.
"""
from evobench.byzantine import ByzantineParams, byzantine_experiment, relative_effort

ps = [0.0, 0.1, 0.2, 0.3, 0.45]
res = byzantine_experiment(ByzantineParams(p=ps, mu=50, length=60, budget=60_000), 10, master_seed=3)
for r in res.summary:
    q = r.payload
    print(f"{q['problem']:>11} p={q['p']:.2f}  mean best true {q['mean_final_best_true']:6.2f}")

base = res.runs[("onemax", "inverter", 0.0)]
for p in ps[1:]:
    e = relative_effort(res.runs[("onemax", "inverter", p)], base, 0.95)
    print(f"OneMax effort to 95% at p={p:.2f}:", "not reached" if e is None else round(e, 2))
