"""Panmictic GA under unreliable (byzantine) fitness evaluation.

Each evaluation request first logs the true fitness, then with probability
``p`` is answered with a corrupted value instead:

* ``randomizer`` returns the true fitness of a uniformly chosen earlier
  request (a uniform value in ``[0, length]`` if there is none yet);
* ``inverter`` reflects the true value inside the running true-fitness range,
  ``f_max - (f - f_min)``.

Selection and replacement see only the unreliable value.  True fitness goes
to a shadow log that feeds the diagnostics and nothing else.

Population entropy is the mean over loci of the binary Shannon entropy of
the one-bit frequency, so it lies in [0, 1] and is 0 only for a
monomorphic population.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

from .harness import RunRecord, derive_run_seed, make_rng, param, run_parallel

PROBLEMS = ("onemax", "leadingones")
MODELS = ("none", "randomizer", "inverter")
DEFAULT_QUALITIES = (0.90, 0.95, 0.99, 1.00)
_Q_COLUMNS = ("evals_to_q90", "evals_to_q95", "evals_to_q99", "evals_to_q100")


# ---------------------------------------------------------------------------
# objective functions


@numba.njit(cache=True)
def _onemax(bits):
    s = 0
    for b in bits:
        s += b
    return s


@numba.njit(cache=True)
def _leading_ones(bits):
    for i in range(bits.shape[0]):
        if bits[i] == 0:
            return i
    return bits.shape[0]


def onemax(genome) -> int:
    return int(np.count_nonzero(genome))


def leading_ones(genome) -> int:
    g = np.asarray(genome)
    zeros = np.flatnonzero(g == 0)
    return int(zeros[0]) if len(zeros) else len(g)


# ---------------------------------------------------------------------------
# corruption


@numba.njit(cache=True)
def _corrupt(state, history, kind, p, length, f_true, rng):
    # state = [history_len, f_min, f_max, initialised]
    if state[3] == 0:
        state[1] = f_true
        state[2] = f_true
        state[3] = 1
    else:
        if f_true < state[1]:
            state[1] = f_true
        if f_true > state[2]:
            state[2] = f_true
    h = state[0]
    history[h] = f_true
    state[0] = h + 1
    if kind == 0:
        return f_true
    if rng.random() < p:
        if kind == 1:
            if h == 0:
                return rng.integers(0, length + 1)
            return history[rng.integers(0, h)]
        return state[2] - (f_true - state[1])
    return f_true


@dataclass
class CorruptionModel:
    """Corruption state.  ``length`` bounds the randomizer's fallback range."""

    kind: str = "none"
    p: float = 0.0
    length: int = 100
    _state: np.ndarray = field(default_factory=lambda: np.zeros(4, np.int64), repr=False)
    _history: np.ndarray = field(default_factory=lambda: np.zeros(1024, np.int64), repr=False)

    def __post_init__(self):
        if self.kind not in MODELS:
            raise ValueError(f"unknown corruption model {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p out of range: {self.p}")

    @property
    def history(self) -> np.ndarray:
        return self._history[: self._state[0]].copy()

    @property
    def f_min(self):
        return int(self._state[1]) if self._state[3] else None

    @property
    def f_max(self):
        return int(self._state[2]) if self._state[3] else None


def corrupt(model: CorruptionModel, f_true: int, rng: np.random.Generator) -> int:
    """Log ``f_true`` and return the (possibly corrupted) value the EA sees."""
    if model._state[0] >= len(model._history):
        model._history = np.concatenate([model._history, np.zeros_like(model._history)])
    return int(_corrupt(model._state, model._history, MODELS.index(model.kind), model.p, model.length, int(f_true), rng))


# ---------------------------------------------------------------------------
# diagnostics


@numba.njit(cache=True)
def _entropy(pop):
    mu, length = pop.shape
    total = 0.0
    for j in range(length):
        ones = 0
        for i in range(mu):
            ones += pop[i, j]
        q = ones / mu
        if 0.0 < q < 1.0:
            total -= q * math.log2(q) + (1.0 - q) * math.log2(1.0 - q)
    return total / length


def population_entropy(population) -> float:
    pop = np.ascontiguousarray(population, dtype=np.uint8)
    if pop.ndim != 2 or pop.shape[0] == 0:
        raise ValueError("population must be a non-empty 2-D bit array")
    return float(_entropy(pop))


# ---------------------------------------------------------------------------
# the GA


@numba.njit(cache=True)
def _tournament(fit, rng):
    i = rng.integers(0, fit.shape[0])
    j = rng.integers(0, fit.shape[0])
    if fit[i] > fit[j]:
        return i
    if fit[j] > fit[i]:
        return j
    return i if rng.random() < 0.5 else j


@numba.njit(cache=True)
def _mutate(child, rate, rng):
    length = child.shape[0]
    pos = rng.geometric(rate) - 1
    while pos < length:
        child[pos] ^= 1
        pos += rng.geometric(rate)


@numba.njit(cache=True)
def _ga(rng, problem, kind, p, mu, length, px, budget, thresholds, log_fitness):
    """Returns (best_true per generation, min entropy, evals per threshold, true log, unreliable log)."""
    n_gen = (budget - mu) // mu + 1
    trace = np.empty(n_gen, np.int64)
    reached = np.full(thresholds.shape[0], -1, np.int64)
    state = np.zeros(4, np.int64)
    history = np.empty(budget, np.int64)
    log_true = np.empty(budget if log_fitness else 0, np.int64)
    log_unrel = np.empty(budget if log_fitness else 0, np.int64)

    pop = np.empty((mu, length), np.uint8)
    kids = np.empty((mu, length), np.uint8)
    fit = np.empty(mu, np.int64)
    kid_fit = np.empty(mu, np.int64)
    true_fit = np.empty(mu, np.int64)
    kid_true = np.empty(mu, np.int64)
    for i in range(mu):
        for j in range(length):
            pop[i, j] = rng.integers(0, 2)

    evals = 0
    best = -1
    min_entropy = 2.0
    for gen in range(n_gen):
        target = pop if gen == 0 else kids
        tf = true_fit if gen == 0 else kid_true
        uf = fit if gen == 0 else kid_fit
        if gen > 0:
            for k in range(mu // 2):
                a = _tournament(fit, rng)
                b = _tournament(fit, rng)
                kids[2 * k, :] = pop[a]
                kids[2 * k + 1, :] = pop[b]
                if rng.random() < px:
                    cut = rng.integers(1, length)
                    for j in range(cut, length):
                        kids[2 * k, j] = pop[b, j]
                        kids[2 * k + 1, j] = pop[a, j]
                _mutate(kids[2 * k], 1.0 / length, rng)
                _mutate(kids[2 * k + 1], 1.0 / length, rng)
        for i in range(mu):
            t = _onemax(target[i]) if problem == 0 else _leading_ones(target[i])
            u = _corrupt(state, history, kind, p, length, t, rng)
            if log_fitness:
                log_true[evals] = t
                log_unrel[evals] = u
            evals += 1
            tf[i] = t
            uf[i] = u
            if t > best:
                best = t
                for q in range(thresholds.shape[0]):
                    if reached[q] < 0 and t >= thresholds[q]:
                        reached[q] = evals
        if gen > 0:
            # elitism of one, judged on unreliable fitness only
            elite = np.argmax(fit)
            worst = np.argmin(kid_fit)
            kids[worst, :] = pop[elite]
            kid_fit[worst] = fit[elite]
            kid_true[worst] = true_fit[elite]
            pop, kids = kids, pop
            fit, kid_fit = kid_fit, fit
            true_fit, kid_true = kid_true, true_fit
        trace[gen] = best
        h = _entropy(pop)
        if h < min_entropy:
            min_entropy = h
    return trace, min_entropy, reached, log_true, log_unrel


@dataclass
class ByzRunRecord:
    problem: str
    model: str
    p: float
    best_true_trace: np.ndarray
    min_entropy: float
    evals_to_quality: dict  # quality -> evaluation count, None if not reached
    evaluations: int
    true_log: np.ndarray | None = None
    unreliable_log: np.ndarray | None = None

    @property
    def final_best_true(self) -> int:
        return int(self.best_true_trace[-1])


def evolve_byzantine_run(
    problem: str,
    model: str,
    p: float,
    mu: int,
    px: float,
    length: int,
    eval_budget: int,
    rng: np.random.Generator,
    qualities: Sequence[float] = DEFAULT_QUALITIES,
    log_fitness: bool = False,
) -> ByzRunRecord:
    """Elitist generational GA: binary tournament, one-point crossover, 1/length bit flips.

    Runs whole generations while the budget allows; every individual is
    evaluated exactly once.
    """
    if problem not in PROBLEMS:
        raise ValueError(f"unknown problem {problem!r}")
    if model not in MODELS:
        raise ValueError(f"unknown corruption model {model!r}")
    if mu < 2 or mu % 2:
        raise ValueError("mu must be even and at least 2")
    if eval_budget < mu:
        raise ValueError("budget must cover the initial population")
    if length < 2:
        raise ValueError("length must be at least 2")
    if not 0.0 <= p <= 1.0 or not 0.0 <= px <= 1.0:
        raise ValueError("probabilities must lie in [0, 1]")
    thresholds = np.array([math.ceil(q * length - 1e-9) for q in qualities], np.int64)
    trace, min_h, reached, log_t, log_u = _ga(
        rng, PROBLEMS.index(problem), MODELS.index(model), float(p), mu, length, float(px),
        eval_budget, thresholds, log_fitness,
    )
    evals = len(trace) * mu
    to_q = {q: (int(r) if r >= 0 else None) for q, r in zip(qualities, reached)}
    return ByzRunRecord(
        problem, model, p, trace, float(min_h), to_q, evals,
        log_t if log_fitness else None, log_u if log_fitness else None,
    )


def relative_effort(records_at_p: Sequence[ByzRunRecord], records_at_0: Sequence[ByzRunRecord], quality: float):
    """Mean evaluations to ``quality`` at p over the same at p = 0.

    Only runs that reached the threshold count.  ``None`` means no run at p
    (or at the baseline) got there.
    """
    if not 0.0 < quality <= 1.0:
        raise ValueError(f"quality must lie in (0, 1], got {quality}")
    if not records_at_p or not records_at_0:
        raise ValueError("both record sets must be non-empty")

    def mean_evals(records):
        hits = [r.evals_to_quality.get(quality) for r in records]
        hits = [h for h in hits if h is not None]
        return np.mean(hits) if hits else None

    at_p, at_0 = mean_evals(records_at_p), mean_evals(records_at_0)
    if at_p is None or at_0 is None:
        return None
    return float(at_p / at_0)


# ---------------------------------------------------------------------------
# experiment


@dataclass
class ByzantineParams:
    """Sweep over problems x models x p; ``runs`` counts runs per cell."""

    default_runs = 50

    problems: list = param(list(PROBLEMS), "list[str]")
    models: list = param(["inverter"], "list[str]")
    p: list = param([round(0.05 * i, 2) for i in range(11)], "list[float]")
    mu: int = param(100, "int")
    length: int = param(100, "int")
    px: float = param(0.9, "float")
    budget: int = param(1_000_000, "int")

    def __post_init__(self):
        from .harness import _check

        _check("problems", self.problems, bool(self.problems) and all(x in PROBLEMS for x in self.problems))
        _check("models", self.models, bool(self.models) and all(x in MODELS for x in self.models))
        _check("p", self.p, bool(self.p) and all(0.0 <= x <= 1.0 for x in self.p))
        _check("mu", self.mu, self.mu >= 2 and self.mu % 2 == 0)
        _check("length", self.length, self.length >= 2)
        _check("px", self.px, 0.0 <= self.px <= 1.0)
        _check("budget", self.budget, self.budget >= self.mu)


def _one_run(task):
    problem, model, p, params, seed = task
    return evolve_byzantine_run(problem, model, p, params.mu, params.px, params.length, params.budget, make_rng(seed))


def cell_index(problem: str, model: str, p: float) -> int:
    """Stable cell number so a sub-sweep reproduces the runs of a full one."""
    return (PROBLEMS.index(problem) * len(MODELS) + MODELS.index(model)) * 1001 + int(round(p * 1000))


@dataclass
class ByzantineResult:
    records: list[RunRecord]
    summary: list[RunRecord]
    runs: dict  # (problem, model, p) -> list[ByzRunRecord]


def byzantine_experiment(params: ByzantineParams, runs: int, master_seed: int, workers: int = 1) -> ByzantineResult:
    """Full sweep.  Run ``r`` of a cell uses run index ``cell_index * runs + r``.

    Relative effort in the summary is taken against p = 0 of the same problem
    and model; it is empty when p = 0 is not part of the grid.
    """
    tasks, meta = [], []
    for problem in params.problems:
        for model in params.models:
            for p in params.p:
                for r in range(runs):
                    idx = cell_index(problem, model, p) * runs + r
                    seed = derive_run_seed(master_seed, idx)
                    tasks.append((problem, model, p, params, seed))
                    meta.append((idx, seed))
    results = run_parallel(_one_run, tasks, workers)

    records = []
    cells: dict = {}
    for (idx, seed), res in zip(meta, results):
        cells.setdefault((res.problem, res.model, res.p), []).append(res)
        payload = {
            "problem": res.problem, "model": res.model, "p": res.p,
            "final_best_true": res.final_best_true, "min_entropy": res.min_entropy,
        }
        for q, col in zip(DEFAULT_QUALITIES, _Q_COLUMNS):
            payload[col] = res.evals_to_quality.get(q)
        records.append(RunRecord("byzantine", idx, seed, payload))

    summary = []
    for i, ((problem, model, p), cell) in enumerate(cells.items()):
        base = cells.get((problem, model, 0.0))
        row = {
            "problem": problem, "model": model, "p": p, "runs": len(cell),
            "mean_final_best_true": float(np.mean([r.final_best_true for r in cell])),
            "mean_min_entropy": float(np.mean([r.min_entropy for r in cell])),
        }
        for q, col in zip(DEFAULT_QUALITIES, ("effort_q90", "effort_q95", "effort_q99", "effort_q100")):
            row[col] = relative_effort(cell, base, q) if base else None
        summary.append(RunRecord("byzantine_summary", i, 0, row))
    return ByzantineResult(records, summary, cells)
