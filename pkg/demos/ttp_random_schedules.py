"""Constraint violations of random double round-robin schedules.

Draws schedules with no constraint handling, counts violations per rule and
fits the growth of the means in n.  Writes a small SVG of the drr means.
"""
from pathlib import Path

from evobench.harness import make_rng, write_records
from evobench.plotting import PlotSpec, emit_plot
from evobench.ttp import count_violations, gen_schedule, oracle_valid_drr_schedule, ttp_ensemble

s = gen_schedule(6, make_rng(3))
print("one random schedule for 6 teams:", count_violations(s))
print("circle-method oracle for 6 teams:", count_violations(oracle_valid_drr_schedule(6)))

records, fits = ttp_ensemble(list(range(4, 21, 2)), 5000, master_seed=11)
for r in records:
    q = r.payload
    print(f"n={q['n_teams']:>2}  drr {q['drr_mean']:8.2f}  streak {q['streak_mean']:6.2f}  "
          f"norep {q['norep_mean']:5.2f}  best total {q['min_total']}")
for f in fits:
    q = f.payload
    print(f"{q['constraint']:>6}: {q['c2']:.3f} n^2 + {q['c1']:.3f} n + {q['c0']:.3f}  rmse {q['rmse']:.3f}")

out = Path("demo_out")
write_records(records, out / "ttp.csv")
emit_plot(out / "ttp.csv", PlotSpec("line", "n_teams", ["drr_mean", "streak_mean", "norep_mean"],
                                    title="mean violations", x_label="teams"), out / "ttp.svg")
print("wrote", out / "ttp.svg")
