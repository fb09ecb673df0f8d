"""Assignment-problem solutions read as ATSP tours.

Random integer cost matrices are solved to optimality and the optimal
permutation is split into cycles (subtours).  A solution is also a valid
ATSP tour exactly when it consists of a single subtour.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np

from . import stats
from .harness import RunRecord, derive_run_seed, make_rng, param, run_parallel

log = logging.getLogger(__name__)

# 1..10, 20..100, 200..1000, ..., 10^7..9*10^7: 72 values
RAND_MAX_LADDER = sorted(set([*range(1, 11)] + [m * 10**e for e in range(1, 8) for m in range(1, 10)]))


@dataclass
class CostMatrix:
    entries: np.ndarray
    rand_max: int | None = None

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass
class ApSolution:
    assignment: tuple[int, ...]
    cost: int
    subtour_lengths: tuple[int, ...] | None = None

    @property
    def is_tour(self) -> bool:
        return self.subtour_lengths is not None and len(self.subtour_lengths) == 1


def gen_cost_matrix(n: int, rand_max: int, rng: np.random.Generator, inclusive: bool = False) -> CostMatrix:
    """Uniform random integer matrix, diagonal included.

    Entries are drawn from ``{0, ..., rand_max - 1}``, or ``{0, ..., rand_max}``
    with ``inclusive=True``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if rand_max < 1:
        raise ValueError("rand_max must be positive")
    high = rand_max + 1 if inclusive else rand_max
    return CostMatrix(rng.integers(0, high, size=(n, n), dtype=np.int64), rand_max)


@numba.njit(cache=True)
def _hungarian(cost):
    # Kuhn-Munkres with row/column potentials; one augmenting path per row.
    n = cost.shape[0]
    inf = np.iinfo(np.int64).max // 4
    u = np.zeros(n + 1, np.int64)
    v = np.zeros(n + 1, np.int64)
    match = np.zeros(n + 1, np.int64)  # match[j] = row owning column j, 1-based
    way = np.zeros(n + 1, np.int64)
    minv = np.empty(n + 1, np.int64)
    used = np.empty(n + 1, np.bool_)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv[:] = inf
        used[:] = False
        while True:
            used[j0] = True
            i0 = match[j0]
            delta = inf
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while True:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
            if j0 == 0:
                break
    assignment = np.empty(n, np.int64)
    for j in range(1, n + 1):
        assignment[match[j] - 1] = j - 1
    return assignment


def _as_matrix(m) -> np.ndarray:
    entries = m.entries if isinstance(m, CostMatrix) else m
    entries = np.asarray(entries)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.size == 0:
        raise ValueError(f"cost matrix must be square and non-empty, got shape {entries.shape}")
    if not np.issubdtype(entries.dtype, np.integer):
        if not np.all(entries == np.round(entries)):
            raise ValueError("cost entries must be integers")
    entries = entries.astype(np.int64)
    if entries.min() < 0:
        raise ValueError("cost entries must be non-negative")
    return entries


def hungarian_solve(m, solver: str = "native") -> ApSolution:
    """Exact minimum-cost assignment.

    ``solver="native"`` is the in-house O(n^3) Hungarian method;
    ``solver="scipy"`` delegates to ``scipy.optimize.linear_sum_assignment``.
    Both are exact; they may pick different optima when costs tie.
    """
    entries = _as_matrix(m)
    if solver == "native":
        assignment = _hungarian(entries)
    elif solver == "scipy":
        from scipy.optimize import linear_sum_assignment

        _, assignment = linear_sum_assignment(entries)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    cost = int(entries[np.arange(len(entries)), assignment].sum())
    return ApSolution(tuple(int(a) for a in assignment), cost)


def cycle_decompose(assignment: Sequence[int]) -> tuple[int, ...]:
    """Cycle lengths of a permutation, sorted descending."""
    perm = np.asarray(assignment, dtype=np.int64)
    n = len(perm)
    if n == 0 or perm.min() < 0 or perm.max() >= n or len(np.unique(perm)) != n:
        raise ValueError("assignment is not a bijection on 0..n-1")
    seen = np.zeros(n, dtype=bool)
    lengths = []
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def solve_with_subtours(m, solver: str = "native") -> ApSolution:
    sol = hungarian_solve(m, solver)
    sol.subtour_lengths = cycle_decompose(sol.assignment)
    return sol


def brute_force_min_cost(m) -> int:
    """Factorial enumeration; test oracle for small n."""
    from itertools import permutations

    entries = _as_matrix(m)
    n = len(entries)
    rows = np.arange(n)
    perms = np.array(list(permutations(range(n))))
    return int(entries[rows, perms].sum(axis=1).min())


# ---------------------------------------------------------------------------
# ensemble


@dataclass
class ApAtspParams:
    """Parameters of the AP-to-ATSP sweep.

    ``runs`` of the enclosing config is the matrix count per subensemble.
    ``rand_max`` is a list of values or ``ladder`` for the 72-value log ladder 1..9e7.
    """

    default_runs = 1000

    n: int = param(100, "int")
    rand_max: str = param("ladder", "str")
    inclusive: bool = param(False, "bool")
    solver: str = param("native", "str")

    def __post_init__(self):
        from .harness import _check

        _check("n", self.n, self.n >= 2)
        _check("solver", self.solver, self.solver in ("native", "scipy"))
        try:
            values = self.rand_max_values()
        except ValueError:
            values = []
        _check("rand_max", self.rand_max, bool(values) and all(v >= 1 for v in values))

    def rand_max_values(self) -> list[int]:
        return parse_rand_max(self.rand_max)


def parse_rand_max(spec) -> list[int]:
    if isinstance(spec, str):
        if spec.strip() == "ladder":
            return list(RAND_MAX_LADDER)
        from .harness import parse_int

        return [parse_int(p) for p in spec.split(",") if p.strip()]
    return [int(v) for v in spec]


CHUNK = 50


def _solve_chunk(task):
    n, rand_max, inclusive, solver, master_seed, first, count = task
    counts = np.empty(count, dtype=np.int64)
    lengths = []
    for k in range(count):
        rng = make_rng(derive_run_seed(master_seed, first + k))
        m = gen_cost_matrix(n, rand_max, rng, inclusive)
        sol = solve_with_subtours(m, solver)
        counts[k] = len(sol.subtour_lengths)
        lengths.extend(sol.subtour_lengths)
    return counts, np.asarray(lengths, dtype=np.int64)


def summarize_subensemble(n: int, rand_max: int, counts: np.ndarray, lengths: np.ndarray) -> dict:
    q1_sub, q3_sub = stats.half_means(counts) if len(counts) >= 2 else (float(counts[0]),) * 2
    q1_len, q3_len = stats.half_means(lengths) if len(lengths) >= 2 else (float(lengths[0]),) * 2
    return {
        "rand_max": rand_max,
        "n": n,
        "matrices": len(counts),
        "tour_fraction": float(np.mean(counts == 1)),
        "mean_subtours": float(counts.mean()),
        "max_subtours": int(counts.max()),
        "q1_subtours": q1_sub,
        "q3_subtours": q3_sub,
        # pooled over every subtour of every solution
        "mean_subtour_len": float(lengths.mean()),
        "q1_len": q1_len,
        "q3_len": q3_len,
    }


def ap_atsp_ensemble(
    n: int,
    rand_max_list: Sequence[int],
    matrices_per_subensemble: int,
    master_seed: int,
    inclusive: bool = False,
    solver: str = "native",
    workers: int = 1,
) -> list[RunRecord]:
    """One record per rand_max value.

    Matrix ``i`` of subensemble ``k`` is seeded with run index
    ``k * matrices_per_subensemble + i``.
    """
    if matrices_per_subensemble < 1:
        raise ValueError("matrices_per_subensemble must be at least 1")
    tasks, owner = [], []
    for k, rand_max in enumerate(rand_max_list):
        base = k * matrices_per_subensemble
        for first in range(0, matrices_per_subensemble, CHUNK):
            count = min(CHUNK, matrices_per_subensemble - first)
            tasks.append((n, int(rand_max), inclusive, solver, master_seed, base + first, count))
            owner.append(k)
    results = run_parallel(_solve_chunk, tasks, workers)

    records = []
    for k, rand_max in enumerate(rand_max_list):
        chunks = [res for res, o in zip(results, owner) if o == k]
        counts = np.concatenate([c for c, _ in chunks])
        lengths = np.concatenate([ln for _, ln in chunks])
        payload = summarize_subensemble(n, int(rand_max), counts, lengths)
        # With one distinct value every assignment is optimal; the solver's
        # tie-breaking alone decides the subtours.
        payload["degenerate"] = (int(rand_max) == 1 and not inclusive)
        records.append(RunRecord("ap_atsp", k, derive_run_seed(master_seed, k * matrices_per_subensemble), payload))
    return records
