import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from evobench.byzantine import (
    ByzantineParams,
    CorruptionModel,
    byzantine_experiment,
    cell_index,
    corrupt,
    evolve_byzantine_run,
    leading_ones,
    onemax,
    population_entropy,
    relative_effort,
)
from evobench.harness import ConfigError, make_rng


def test_objective_examples():
    ones = np.ones(100, np.uint8)
    assert onemax(ones) == 100 and leading_ones(ones) == 100
    g = np.ones(100, np.uint8)
    g[2] = 0
    g[50:] = np.random.default_rng(0).integers(0, 2, 50)
    assert leading_ones(g) == 2


def test_objectives_against_bit_loops():
    rng = np.random.default_rng(1)
    for _ in range(10**4):
        g = rng.integers(0, 2, size=rng.integers(1, 40))
        count = 0
        for b in g:
            count += int(b)
        prefix = 0
        for b in g:
            if not b:
                break
            prefix += 1
        assert onemax(g) == count and leading_ones(g) == prefix


def test_corrupt_p_zero_is_identity():
    rng = make_rng(0)
    for kind in ("none", "randomizer", "inverter"):
        m = CorruptionModel(kind, 0.0, 100)
        values = rng.integers(0, 101, 200)
        assert [corrupt(m, int(v), rng) for v in values] == list(values)
        assert list(m.history) == list(values)


def test_inverter_endpoints_and_involution():
    rng = make_rng(1)
    m = CorruptionModel("inverter", 1.0, 100)
    for v in (40, 70, 55):
        corrupt(m, v, rng)
    assert (m.f_min, m.f_max) == (40, 70)
    assert corrupt(m, 70, rng) == 40
    assert corrupt(m, 40, rng) == 70
    for f in range(40, 71):
        once = corrupt(m, f, rng)
        assert corrupt(m, once, rng) == f
    assert (m.f_min, m.f_max) == (40, 70)


def test_extremes_update_before_corruption():
    m = CorruptionModel("inverter", 1.0, 100)
    rng = make_rng(2)
    assert corrupt(m, 50, rng) == 50  # first value is its own min and max
    assert corrupt(m, 90, rng) == 50  # 90 is the new max: 90 - (90 - 50)


def test_randomizer_draws_from_earlier_history():
    rng = make_rng(3)
    m = CorruptionModel("randomizer", 1.0, 10)
    first = corrupt(m, 7, rng)
    assert 0 <= first <= 10
    for v in (1, 2, 3):
        corrupt(m, v, rng)
    seen = {corrupt(m, 100, rng) for _ in range(300)}
    # the just-added 100 is never returned until it is in the earlier history
    assert 7 in seen and 1 in seen and seen <= {7, 1, 2, 3, 100}


@given(st.lists(st.integers(0, 100), min_size=1, max_size=60), st.integers(0, 2**32))
def test_inverter_stays_in_range(values, seed):
    rng = make_rng(seed)
    m = CorruptionModel("inverter", 0.7, 100)
    for v in values:
        out = corrupt(m, v, rng)
        assert m.f_min <= out <= m.f_max


def test_model_validation():
    with pytest.raises(ValueError):
        CorruptionModel("flipper")
    with pytest.raises(ValueError):
        CorruptionModel("inverter", 1.5)


def test_entropy_examples():
    assert population_entropy(np.zeros((5, 8))) == 0
    half = np.array([[0, 1, 1, 0], [1, 0, 0, 1]] * 3)
    assert population_entropy(half) == pytest.approx(1.0)
    rng = np.random.default_rng(4)
    low = sum(population_entropy(rng.integers(0, 2, (100, 100))) < 0.95 for _ in range(1000))
    assert low <= 10
    with pytest.raises(ValueError):
        population_entropy(np.zeros((0, 3)))


@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**32))
def test_entropy_bounds(mu, length, seed):
    pop = np.random.default_rng(seed).integers(0, 2, (mu, length))
    h = population_entropy(pop)
    assert 0.0 <= h <= 1.0
    monomorphic = all(len(set(pop[:, j])) == 1 for j in range(length))
    assert (h == 0) == monomorphic


def test_onemax_baseline_run():
    run = evolve_byzantine_run("onemax", "none", 0.0, 100, 0.9, 100, 100_000, make_rng(5))
    assert run.final_best_true == 100
    assert run.evaluations == 100_000
    assert np.all(np.diff(run.best_true_trace) >= 0)
    reached = [run.evals_to_quality[q] for q in (0.9, 0.95, 0.99, 1.0)]
    assert all(r is not None for r in reached) and reached == sorted(reached)


def test_replay_is_identical():
    a = evolve_byzantine_run("leadingones", "inverter", 0.2, 20, 0.9, 30, 4000, make_rng(6))
    b = evolve_byzantine_run("leadingones", "inverter", 0.2, 20, 0.9, 30, 4000, make_rng(6))
    assert (a.best_true_trace == b.best_true_trace).all() and a.min_entropy == b.min_entropy


def test_none_model_logs_match():
    run = evolve_byzantine_run("onemax", "none", 0.5, 10, 0.9, 20, 1000, make_rng(7), log_fitness=True)
    assert len(run.true_log) == 1000
    assert (run.true_log == run.unreliable_log).all()


def test_corrupted_logs_differ_and_stay_in_range():
    run = evolve_byzantine_run("onemax", "inverter", 0.5, 10, 0.9, 20, 1000, make_rng(8), log_fitness=True)
    assert (run.true_log != run.unreliable_log).any()
    assert run.unreliable_log.min() >= run.true_log.min() and run.unreliable_log.max() <= run.true_log.max()


@pytest.mark.parametrize("bad", [
    dict(problem="twomax"), dict(model="liar"), dict(mu=3), dict(mu=10, eval_budget=5), dict(p=1.2),
])
def test_run_validation(bad):
    kw = dict(problem="onemax", model="none", p=0.0, mu=10, px=0.9, length=10, eval_budget=100)
    kw.update(bad)
    with pytest.raises(ValueError):
        evolve_byzantine_run(rng=make_rng(0), **kw)


def test_relative_effort():
    base = [evolve_byzantine_run("onemax", "none", 0.0, 20, 0.9, 30, 3000, make_rng(s)) for s in range(3)]
    assert relative_effort(base, base, 0.95) == pytest.approx(1.0)
    weak = [evolve_byzantine_run("onemax", "none", 0.0, 20, 0.9, 30, 20, make_rng(9))]
    assert relative_effort(weak, base, 1.0) is None
    with pytest.raises(ValueError):
        relative_effort([], base, 0.9)


def test_cell_index_distinct():
    cells = {cell_index(pr, mo, round(0.05 * i, 2)) for pr in ("onemax", "leadingones")
             for mo in ("none", "randomizer", "inverter") for i in range(21)}
    assert len(cells) == 2 * 3 * 21


def test_params_validation():
    with pytest.raises(ConfigError, match="mu"):
        ByzantineParams(mu=7)
    with pytest.raises(ConfigError, match="models"):
        ByzantineParams(models=["liar"])


def test_small_experiment_and_subset():
    params = ByzantineParams(problems=["onemax"], models=["inverter"], p=[0.0, 0.3], mu=20, length=30, budget=3000)
    full = byzantine_experiment(params, 3, master_seed=4)
    assert len(full.records) == 6 and len(full.summary) == 2
    assert full.summary[0].payload["effort_q90"] == pytest.approx(1.0)
    sub = byzantine_experiment(
        ByzantineParams(problems=["onemax"], models=["inverter"], p=[0.3], mu=20, length=30, budget=3000), 3, 4
    )
    assert [r.payload for r in sub.records] == [r.payload for r in full.records[3:]]
    assert sub.summary[0].payload["effort_q90"] is None
