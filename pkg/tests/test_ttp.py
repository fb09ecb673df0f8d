from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from evobench.harness import make_rng
from evobench.ttp import (
    Schedule,
    ViolationCounts,
    count_violations,
    count_violations_batch,
    fit_violation_growth,
    gen_schedule,
    gen_schedules,
    oracle_valid_drr_schedule,
    ttp_ensemble,
)


def naive_counts(opp, home, limit=3):
    """Per-team recount written with plain loops."""
    rounds, n = opp.shape
    drr = streak = norep = 0
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            met = [r for r in range(rounds) if opp[r][a] == b]
            c = len(met)
            if c > 2:
                drr += c - 2
            elif c == 1:
                drr += 1
            elif c == 0:
                drr += 2
            elif sum(bool(home[r][a]) for r in met) != 1:
                drr += 1
            run = 0
            for r in range(rounds):
                run = run + 1 if opp[r][a] == b else 0
                if run >= 2:
                    norep += 1
    for a in range(n):
        run = 1
        for r in range(1, rounds):
            run = run + 1 if home[r][a] == home[r - 1][a] else 1
            if run > limit:
                streak += 1
    return drr, streak, norep


def test_schedule_structure():
    s = gen_schedule(4, make_rng(0))
    s.validate()
    assert s.rounds == 6
    assert all(s.home[r].sum() == 2 for r in range(6))
    t = gen_schedule(4, make_rng(0))
    assert (s.opponent == t.opponent).all() and (s.home == t.home).all()


def test_validate_rejects_broken_schedules():
    s = gen_schedule(6, make_rng(1))
    bad = Schedule(s.opponent.copy(), s.home.copy())
    bad.home[0, :] = True
    with pytest.raises(ValueError, match="home"):
        bad.validate()
    bad = Schedule(s.opponent.copy(), s.home.copy())
    bad.opponent[2, 0] = 0
    with pytest.raises(ValueError, match="matching"):
        bad.validate()
    with pytest.raises(ValueError):
        gen_schedule(5, make_rng(0))


def _round_one_distribution(n):
    """Exact P(team t meets o, t at home) for the ascending sequential process."""
    probs = {}

    def walk(unplaced, pairs, p):
        if not unplaced:
            for (a, b) in pairs:
                for host, guest in ((a, b), (b, a)):
                    probs[(host, guest)] = probs.get((host, guest), 0) + p / 2
            return
        t = unplaced[0]
        rest = unplaced[1:]
        for o in rest:
            walk([x for x in rest if x != o], pairs + [(t, o)], p / len(rest))

    walk(list(range(n)), [], Fraction(1))
    return probs


def test_round_one_frequencies_match_enumeration():
    n, samples = 6, 10**5
    exact = _round_one_distribution(n)
    opp, home = gen_schedules(n, samples, make_rng(11))
    for (t, o), p in exact.items():
        hits = np.sum((opp[:, 0, t] == o) & home[:, 0, t])
        sigma = np.sqrt(samples * float(p) * (1 - float(p)))
        assert abs(hits - samples * float(p)) < 5 * sigma


@pytest.mark.parametrize("n", [4, 6, 8])
def test_counter_matches_naive_recount(n):
    opp, home = gen_schedules(n, 10**4 // 3, make_rng(n))
    fast = count_violations_batch(opp, home)
    for b in range(len(opp)):
        assert tuple(fast[b]) == naive_counts(opp[b], home[b])


@given(st.sampled_from([4, 6, 8, 10]), st.integers(0, 2**32), st.integers(1, 5))
def test_counts_invariant_under_relabel_and_reversal(n, seed, limit):
    rng = make_rng(seed)
    s = gen_schedule(n, rng)
    base = count_violations(s, limit)
    perm = rng.permutation(n)  # new label of each team
    opp = np.empty_like(s.opponent)
    home = np.empty_like(s.home)
    opp[:, perm] = perm[s.opponent]
    home[:, perm] = s.home
    assert count_violations(Schedule(opp, home), limit) == base
    assert count_violations(Schedule(s.opponent[::-1].copy(), s.home[::-1].copy()), limit) == base


@pytest.mark.parametrize("n", [4, 6, 8, 12, 20])
def test_oracle_schedule(n):
    s = oracle_valid_drr_schedule(n)
    s.validate()
    v = count_violations(s)
    assert v.drr == 0
    # the middle pairings repeat back to back; each team sees its own repeat
    assert v.no_repeat == n
    meets = np.zeros((n, n), int)
    for r in range(s.rounds):
        meets[np.arange(n), s.opponent[r]] += 1
    off = ~np.eye(n, dtype=bool)
    assert (meets[off] == 2).all()
    assert meets.sum() // 2 == n * (n - 1)


PAIRINGS4 = {0: [(0, 1), (2, 3)], 1: [(0, 2), (1, 3)], 2: [(0, 3), (1, 2)]}


def grid4(kinds, hosts):
    """n=4 schedule from a pairing index per round and the set of home teams."""
    opp = np.empty((6, 4), np.int64)
    home = np.zeros((6, 4), bool)
    for r, kind in enumerate(kinds):
        for a, b in PAIRINGS4[kind]:
            opp[r, a], opp[r, b] = b, a
            host = a if a in hosts[r] else b
            home[r, host] = True
    s = Schedule(opp, home)
    s.validate()
    return s


def test_streak_rule():
    # team 0 hosts rounds 0-4: five straight home games, two beyond the limit
    kinds = [0, 1, 2, 1, 2, 0]
    hosts = [{0, 2}, {0, 3}, {0, 1}, {0, 1}, {0, 1}, {1, 2}]
    s = grid4(kinds, hosts)
    opp_runs = naive_counts(s.opponent, s.home)
    v = count_violations(s)
    assert (v.drr, v.max_streak, v.no_repeat) == opp_runs
    team0 = 0
    run = best = 1
    for r in range(1, 6):
        run = run + 1 if s.home[r, team0] == s.home[r - 1, team0] else 1
        best = max(best, run)
    assert best == 5
    # venues by team: 0 HHHHHA (+2), 1 AAHHHH (+1), 2 HAAAAH (+1), 3 AHAAAA (+1)
    assert v.max_streak == 5


def test_repeat_rule():
    # {0,1} and {2,3} meet in rounds 3 and 4 only, venues swapped between them
    kinds = [1, 2, 1, 0, 0, 2]
    hosts = [{0, 1}, {0, 1}, {2, 3}, {0, 2}, {1, 3}, {2, 3}]
    s = grid4(kinds, hosts)
    v = count_violations(s)
    # each of the four teams sees one back-to-back repeat
    assert v.no_repeat == 4
    # per team: {0,1} meet twice with split venues (0); {0,2}: twice, split venues
    assert v == ViolationCounts(*naive_counts(s.opponent, s.home))


def test_ensemble_and_fits():
    recs, fits = ttp_ensemble([4, 6, 8, 10], 3000, master_seed=1)
    assert [r.payload["n_teams"] for r in recs] == [4, 6, 8, 10]
    for r in recs:
        q = r.payload
        for k in ("drr", "streak", "norep"):
            assert q[f"{k}_min"] <= q[f"{k}_mean"] <= q[f"{k}_max"]
    assert [f.payload["constraint"] for f in fits] == ["drr", "streak", "norep"]
    assert fits[2].payload["c2"] == 0.0
    again = fit_violation_growth(recs)
    assert [f.payload for f in again] == [f.payload for f in fits]
