"""(1+lambda) evolution of bent functions and the operator comparison."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .. import stats
from ..harness import RunRecord, derive_run_seed, make_rng, param, run_parallel
from .genome import fitness, init_genome
from .operators import OP_BOUNDS, OPERATORS, SPAWN_P, VAR_BIASES, mutator
from .walsh import bent_bound

log = logging.getLogger(__name__)


@dataclass
class BentRun:
    operator: str
    evaluations_used: int
    success: bool
    final_nl: int
    params: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)  # (evaluations, parent nl) after each generation


def evolve_bent(
    operator: str,
    n: int,
    d: int,
    lam: int,
    mr: float,
    mc: int,
    eval_budget: int,
    rng: np.random.Generator,
    *,
    init: str = "full",
    spawn_p=SPAWN_P,
    var_bias: str = "linear",
    op_bound: str = "local",
) -> BentRun:
    """(1+lambda) ES without crossover; stops at the first bent genome.

    The initial genome costs one evaluation.  Each generation evaluates up to
    ``lam`` mutants; the best of them replaces the parent when at least as
    fit, and later offspring win ties.  The keyword options select the
    initial shape and the operator variants (see :mod:`.operators`).
    """
    if lam < 1 or eval_budget < 1:
        raise ValueError("need lam >= 1 and eval_budget >= 1")
    mutate = mutator(operator, mr, mc, spawn_p, var_bias, op_bound)
    target = bent_bound(n)
    params = {"mr": mr, "mc": mc, "lam": lam}

    parent = init_genome(n, d, rng, init)
    parent_fit = fitness(parent)
    evals = 1
    trace = [(evals, parent_fit)]
    if parent_fit == target:
        return BentRun(operator, evals, True, parent_fit, params, trace)

    while evals < eval_budget:
        best, best_fit = None, -1
        for _ in range(lam):
            if evals >= eval_budget:
                break
            child = mutate(parent, rng)
            f = fitness(child)
            evals += 1
            if f == target:
                trace.append((evals, f))
                return BentRun(operator, evals, True, f, params, trace)
            if f >= best_fit:
                best, best_fit = child, f
        if best is not None and best_fit >= parent_fit:
            parent, parent_fit = best, best_fit
        trace.append((evals, parent_fit))
    return BentRun(operator, evals, False, parent_fit, params, trace)


@dataclass
class BentParams:
    """Parameters of the operator comparison; ``runs`` counts runs per operator."""

    default_runs = 100

    n: int = param(12, "int")
    depth: int = param(7, "int")
    lam: int = param(4, "int")
    operators: list = param(list(OPERATORS), "list[str]")
    mr: float = param(0.03, "float")
    mc: int = param(4, "int")
    budget: int = param(1_000_000, "int")
    init: str = param("full", "str")
    spawn_p: float = param(SPAWN_P, "float")
    spawn_uniform: bool = param(False, "bool")
    var_bias: str = param("linear", "str")
    op_bound: str = param("local", "str")

    def __post_init__(self):
        from ..harness import _check

        _check("n", self.n, self.n >= 2 and self.n % 2 == 0)
        _check("depth", self.depth, self.depth >= 1)
        _check("lam", self.lam, self.lam >= 1)
        _check("operators", self.operators, bool(self.operators) and all(o in OPERATORS for o in self.operators))
        _check("mr", self.mr, 0.0 <= self.mr <= 1.0)
        _check("mc", self.mc, self.mc >= 0)
        _check("budget", self.budget, self.budget >= 1)
        _check("init", self.init, self.init in ("single", "full"))
        _check("spawn_p", self.spawn_p, 0.0 <= self.spawn_p <= 1.0)
        _check("var_bias", self.var_bias, self.var_bias in VAR_BIASES)
        _check("op_bound", self.op_bound, self.op_bound in OP_BOUNDS)

    def evolve_kwargs(self) -> dict:
        return {
            "init": self.init,
            "spawn_p": None if self.spawn_uniform else self.spawn_p,
            "var_bias": self.var_bias,
            "op_bound": self.op_bound,
        }


def _one_run(task):
    operator, p, seed = task
    rng = make_rng(seed)
    return evolve_bent(operator, p.n, p.depth, p.lam, p.mr, p.mc, p.budget, rng, **p.evolve_kwargs())


@dataclass
class BentReport:
    records: list[RunRecord]
    pairs: list[RunRecord]
    medians: dict[str, float]
    summaries: dict[str, stats.Summary]
    semantic_reduction: float | None


def bent_experiment(params: BentParams, runs: int, master_seed: int, workers: int = 1) -> BentReport:
    """Run every configured operator ``runs`` times and compare them.

    Run ``r`` of operator ``OPERATORS[k]`` uses run index ``k * runs + r``, so
    a subset of operators reproduces the same runs as the full sweep.
    Failed runs (budget exhausted) are left out of the medians and tests.
    """
    if runs < 2:
        raise ValueError("need at least two runs per operator")
    tasks, meta = [], []
    for op in params.operators:
        k = OPERATORS.index(op)
        for r in range(runs):
            idx = k * runs + r
            seed = derive_run_seed(master_seed, idx)
            tasks.append((op, params, seed))
            meta.append((idx, seed))
    results = run_parallel(_one_run, tasks, workers)

    records = []
    evals: dict[str, list[int]] = {op: [] for op in params.operators}
    for (idx, seed), res in zip(meta, results):
        records.append(RunRecord("bent", idx, seed, {
            "operator": res.operator,
            "evaluations_used": res.evaluations_used,
            "success": res.success,
            "final_nl": res.final_nl,
            "trace": res.trace,
        }))
        if res.success:
            evals[res.operator].append(res.evaluations_used)
    for op, values in evals.items():
        failed = runs - len(values)
        if failed:
            log.warning("%s: %d of %d runs exhausted the budget and are excluded", op, failed, runs)

    summaries = {op: stats.descriptive_summary(v) for op, v in evals.items() if v}
    medians = {op: s.median for op, s in summaries.items()}
    pairs = []
    for a, b in combinations(params.operators, 2):
        if evals[a] and evals[b]:
            u, p = stats.mann_whitney_u(evals[a], evals[b])
            pairs.append(RunRecord("bent_report", len(pairs), 0, {"operator_a": a, "operator_b": b, "u": u, "p": p}))
    return BentReport(records, pairs, medians, summaries, semantic_reduction(medians))


def semantic_reduction(medians: dict[str, float]) -> float | None:
    """Relative drop of the semantic median against the best other operator."""
    others = [m for op, m in medians.items() if op != "semantic"]
    if "semantic" not in medians or not others:
        return None
    return 1.0 - medians["semantic"] / min(others)


def pairwise_p(report: BentReport, a: str, b: str) -> float:
    for rec in report.pairs:
        if {rec.payload["operator_a"], rec.payload["operator_b"]} == {a, b}:
            return rec.payload["p"]
    raise KeyError((a, b))
