"""Random TTP schedules and their constraint-violation counts.

A schedule has ``2(n - 1)`` rounds.  Each round is filled by walking the
teams in ascending order: every still-unplaced team draws an opponent
uniformly from the remaining unplaced teams and a fair coin decides who is at
home.  No constraint is enforced during construction.

Violations are counted from each team's point of view, so a pair ``{A, B}``
contributes once as (A, B) and once as (B, A):

* double round-robin: ``c - 2`` extra meetings when ``c > 2``; 1 when ``c = 1``;
  2 when ``c = 0``; 1 when ``c = 2`` but A did not host exactly once;
* max streak: ``L - limit`` for every same-venue run of length ``L > limit``
  (per team);
* no repeat: ``L - 1`` for every run of ``L >= 2`` consecutive rounds in which
  A meets B.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np

from . import stats
from .harness import RunRecord, derive_run_seed, make_rng, param, run_parallel

DEFAULT_MAX_STREAK = 3
BLOCK = 2000  # schedules per seeded work unit


@dataclass
class Schedule:
    opponent: np.ndarray  # (rounds, n_teams) int
    home: np.ndarray  # (rounds, n_teams) bool

    @property
    def n_teams(self) -> int:
        return self.opponent.shape[1]

    @property
    def rounds(self) -> int:
        return self.opponent.shape[0]

    def validate(self) -> None:
        opp, home = self.opponent, self.home
        n = self.n_teams
        if opp.shape != home.shape or opp.ndim != 2:
            raise ValueError("opponent and home grids must share a 2-D shape")
        if n < 4 or n % 2:
            raise ValueError(f"n_teams must be even and >= 4, got {n}")
        if self.rounds != 2 * (n - 1):
            raise ValueError(f"expected {2 * (n - 1)} rounds, got {self.rounds}")
        teams = np.arange(n)
        for r in range(self.rounds):
            row = opp[r]
            if row.min() < 0 or row.max() >= n or np.any(row == teams) or np.any(row[row] != teams):
                raise ValueError(f"round {r}: opponents are not a perfect matching")
            if np.any(home[r] == home[r][row]):
                raise ValueError(f"round {r}: a pairing is not split into home and away")


@dataclass(frozen=True)
class ViolationCounts:
    drr: int
    max_streak: int
    no_repeat: int

    @property
    def total(self) -> int:
        return self.drr + self.max_streak + self.no_repeat

    @property
    def valid(self) -> bool:
        return self.total == 0


def _check_teams(n_teams: int):
    if n_teams < 4 or n_teams % 2:
        raise ValueError(f"n_teams must be even and >= 4, got {n_teams}")


@numba.njit(cache=True)
def _fill(picks, coins, opp, home):
    # picks[b, r, k]: rank among the other unplaced teams for the k-th placement
    count, rounds, half = picks.shape
    n = 2 * half
    placed = np.zeros(n, np.bool_)
    for b in range(count):
        for r in range(rounds):
            placed[:] = False
            k = 0
            for t in range(n):
                if placed[t]:
                    continue
                placed[t] = True
                rank = picks[b, r, k]
                o = t
                while True:
                    o += 1
                    if not placed[o]:
                        if rank == 0:
                            break
                        rank -= 1
                placed[o] = True
                opp[b, r, t] = o
                opp[b, r, o] = t
                home[b, r, t] = coins[b, r, k]
                home[b, r, o] = not coins[b, r, k]
                k += 1


def gen_schedules(n_teams: int, count: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """``count`` random schedules as ``(opponent, home)`` arrays of shape (count, rounds, n)."""
    _check_teams(n_teams)
    rounds, half = 2 * (n_teams - 1), n_teams // 2
    # the k-th placement of a round chooses among n - 1 - 2k unplaced teams
    highs = np.arange(n_teams - 1, 0, -2)
    picks = rng.integers(0, highs, size=(count, rounds, half))
    coins = rng.integers(0, 2, size=(count, rounds, half)).astype(np.bool_)
    opp = np.empty((count, rounds, n_teams), np.int64)
    home = np.empty((count, rounds, n_teams), np.bool_)
    _fill(picks, coins, opp, home)
    return opp, home


def gen_schedule(n_teams: int, rng: np.random.Generator) -> Schedule:
    opp, home = gen_schedules(n_teams, 1, rng)
    return Schedule(opp[0], home[0])


@numba.njit(cache=True)
def _count(opp, home, limit, out):
    count, rounds, n = opp.shape
    meets = np.zeros((n, n), np.int64)
    hosted = np.zeros((n, n), np.int64)
    for b in range(count):
        meets[:, :] = 0
        hosted[:, :] = 0
        streak = 0
        norep = 0
        for t in range(n):
            run = 0
            for r in range(rounds):
                o = opp[b, r, t]
                meets[t, o] += 1
                if home[b, r, t]:
                    hosted[t, o] += 1
                if r > 0 and opp[b, r - 1, t] == o:
                    norep += 1
                if r > 0 and home[b, r, t] == home[b, r - 1, t]:
                    run += 1
                else:
                    run = 1
                if run > limit:
                    streak += 1
        drr = 0
        for t in range(n):
            for o in range(n):
                if o == t:
                    continue
                c = meets[t, o]
                if c > 2:
                    drr += c - 2
                elif c == 1:
                    drr += 1
                elif c == 0:
                    drr += 2
                elif hosted[t, o] != 1:
                    drr += 1
        out[b, 0] = drr
        out[b, 1] = streak
        out[b, 2] = norep


def count_violations_batch(opp: np.ndarray, home: np.ndarray, max_streak_limit: int = DEFAULT_MAX_STREAK) -> np.ndarray:
    """(count, 3) array of drr, max_streak, no_repeat."""
    out = np.empty((opp.shape[0], 3), np.int64)
    _count(np.ascontiguousarray(opp, dtype=np.int64), np.ascontiguousarray(home, dtype=np.bool_), max_streak_limit, out)
    return out


def count_violations(s: Schedule, max_streak_limit: int = DEFAULT_MAX_STREAK) -> ViolationCounts:
    s.validate()
    drr, streak, norep = count_violations_batch(s.opponent[None], s.home[None], max_streak_limit)[0]
    return ViolationCounts(int(drr), int(streak), int(norep))


def oracle_valid_drr_schedule(n_teams: int) -> Schedule:
    """Circle-method round robin followed by its mirror in reverse order.

    The second half replays the first half's rounds backwards with venues
    flipped.  Every pair meets exactly twice, once at each venue, so the
    double round-robin count is zero; the middle round's pairings repeat
    back to back, giving a no-repeat count of ``n_teams`` (both teams of each
    of the ``n_teams / 2`` pairings).
    """
    _check_teams(n_teams)
    n = n_teams
    half_rounds = n - 1
    opp = np.empty((2 * half_rounds, n), np.int64)
    home = np.empty((2 * half_rounds, n), np.bool_)
    ring = list(range(1, n))
    for r in range(half_rounds):
        lineup = [0] + ring
        for i in range(n // 2):
            a, b = lineup[i], lineup[n - 1 - i]
            # alternate the host to keep streaks short
            if (r + i) % 2:
                a, b = b, a
            opp[r, a], opp[r, b] = b, a
            home[r, a], home[r, b] = True, False
        ring = ring[-1:] + ring[:-1]
    opp[half_rounds:] = opp[half_rounds - 1::-1]
    home[half_rounds:] = ~home[half_rounds - 1::-1]
    return Schedule(opp, home)


# ---------------------------------------------------------------------------
# ensemble


@dataclass
class TtpParams:
    """Parameters of the TTP sweep; ``runs`` is the schedule count per n_teams."""

    default_runs = 100_000

    teams: list = param(list(range(4, 51, 2)), "list[int]")
    max_streak: int = param(DEFAULT_MAX_STREAK, "int")

    def __post_init__(self):
        from .harness import _check

        _check("teams", self.teams, bool(self.teams) and all(t >= 4 and t % 2 == 0 for t in self.teams))
        _check("max_streak", self.max_streak, self.max_streak >= 1)


def _sample_block(task):
    n_teams, count, seed, limit = task
    rng = make_rng(seed)
    opp, home = gen_schedules(n_teams, count, rng)
    v = count_violations_batch(opp, home, limit)
    total = v.sum(axis=1)
    return v.min(axis=0), v.sum(axis=0), v.max(axis=0), int(total.min())


def ttp_ensemble(
    n_teams_list: Sequence[int],
    samples_per_n: int,
    master_seed: int,
    max_streak_limit: int = DEFAULT_MAX_STREAK,
    workers: int = 1,
) -> tuple[list[RunRecord], list[RunRecord]]:
    """Per-n violation summaries plus growth-curve fits.

    Schedules are drawn in blocks of ``BLOCK``; block ``b`` of the ``k``-th
    team count is seeded with run index ``k * blocks_per_n + b``.  Fits use
    the per-n means: quadratic for drr and max streak, linear for no repeat.
    """
    if samples_per_n < 1:
        raise ValueError("samples_per_n must be at least 1")
    for n in n_teams_list:
        _check_teams(n)
    blocks = -(-samples_per_n // BLOCK)
    tasks, owner = [], []
    for k, n in enumerate(n_teams_list):
        for b in range(blocks):
            count = min(BLOCK, samples_per_n - b * BLOCK)
            tasks.append((n, count, derive_run_seed(master_seed, k * blocks + b), max_streak_limit))
            owner.append(k)
    results = run_parallel(_sample_block, tasks, workers)

    records = []
    for k, n in enumerate(n_teams_list):
        mine = [res for res, o in zip(results, owner) if o == k]
        lo = np.min([m[0] for m in mine], axis=0)
        total = np.sum([m[1] for m in mine], axis=0)
        hi = np.max([m[2] for m in mine], axis=0)
        mean = total / samples_per_n
        payload = {"n_teams": n, "samples": samples_per_n, "min_total": min(m[3] for m in mine)}
        for j, name in enumerate(("drr", "streak", "norep")):
            payload[f"{name}_min"] = int(lo[j])
            payload[f"{name}_mean"] = float(mean[j])
            payload[f"{name}_max"] = int(hi[j])
        records.append(RunRecord("ttp", k, derive_run_seed(master_seed, k * blocks), payload))
    return records, fit_violation_growth(records)


def fit_violation_growth(records: Sequence[RunRecord]) -> list[RunRecord]:
    fits = []
    for i, (name, degree) in enumerate((("drr", 2), ("streak", 2), ("norep", 1))):
        points = [(r.payload["n_teams"], r.payload[f"{name}_mean"]) for r in records]
        if len(points) < degree + 1:
            continue
        fit = stats.polyfit(points, degree)
        coef = (0.0,) * (2 - degree) + fit.coefficients
        fits.append(RunRecord("ttp_fits", i, 0, {
            "constraint": name, "degree": degree,
            "c2": coef[0], "c1": coef[1], "c0": coef[2], "rmse": fit.rmse,
        }))
    return fits
