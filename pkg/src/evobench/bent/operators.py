"""Mutation operators on :class:`BoolGenome` chromosomes.

A mutated gene always changes to a different value.  For an input gene the
candidates are the ``n`` variables plus ``CHILD`` when the slot may branch.
With ``spawn_p=None`` the new value is uniform over those candidates;
otherwise ``CHILD`` is proposed with probability ``spawn_p`` and a uniform
variable otherwise (redrawing while it equals the old value).  Switching an
input to ``CHILD`` writes a fresh node into the child slot: random op, two
distinct random variables.

Uniform and point mutation act on every gene of the chromosome, dormant
slots included.  Single mutation picks one active node.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .genome import BoolGenome, node_nonlinearities, node_variable_counts
from .walsh import bent_bound

OPERATORS = ("uniform", "point", "single", "semantic")
GENES_PER_NODE = 3
SPAWN_P = 0.75
VAR_BIASES = ("fewest", "linear")
OP_BOUNDS = ("local", "global")


def _draw_input(g: BoolGenome, slot: int, rng, spawn_p, exclude: int) -> int:
    n = g.n_vars
    branch = g.can_branch(slot)
    if spawn_p is None:
        options = n + 1 if branch else n
        while True:
            x = int(rng.integers(options))
            if x != exclude:
                return x
    while True:
        if branch and rng.random() < spawn_p:
            x = n
        else:
            x = int(rng.integers(n))
        if x != exclude:
            return x


def distinct_pair(n: int, rng) -> tuple[int, int]:
    """Uniform ordered pair of distinct indices below ``n``."""
    a = int(rng.integers(n))
    b = int(rng.integers(n - 1))
    return a, b + (b >= a)


def fresh_node(g: BoolGenome, slot: int, rng) -> None:
    g.ops[slot] = rng.integers(2)
    g.inputs[slot] = distinct_pair(g.n_vars, rng)


def mutate_gene(g: BoolGenome, slot: int, gene: int, rng, spawn_p=SPAWN_P) -> None:
    """In-place change of gene 0 (op), 1 (in1) or 2 (in2) of ``slot``."""
    if gene == 0:
        g.ops[slot] ^= 1
        return
    k = gene - 1
    new = _draw_input(g, slot, rng, spawn_p, int(g.inputs[slot, k]))
    g.inputs[slot, k] = new
    if new == g.n_vars:
        fresh_node(g, 2 * slot + 1 + k, rng)


def mutate_uniform(g: BoolGenome, mr: float, rng, spawn_p=SPAWN_P) -> BoolGenome:
    if not 0.0 <= mr <= 1.0:
        raise ValueError(f"mr must lie in [0, 1], got {mr}")
    g = g.copy()
    hits = np.argwhere(rng.random((g.slots, GENES_PER_NODE)) < mr)
    for slot, gene in hits:
        mutate_gene(g, int(slot), int(gene), rng, spawn_p)
    return g


def mutate_point(g: BoolGenome, mc: int, rng, spawn_p=SPAWN_P) -> BoolGenome:
    if mc < 0:
        raise ValueError(f"mc must be non-negative, got {mc}")
    g = g.copy()
    total = g.slots * GENES_PER_NODE
    for c in rng.choice(total, min(mc, total), replace=False):
        mutate_gene(g, int(c) // GENES_PER_NODE, int(c) % GENES_PER_NODE, rng, spawn_p)
    return g


def mutate_single(g: BoolGenome, rng, spawn_p=SPAWN_P) -> BoolGenome:
    g = g.copy()
    act = g.active()
    slot = act[int(rng.integers(len(act)))]
    for gene in range(GENES_PER_NODE):
        mutate_gene(g, slot, gene, rng, spawn_p)
    return g


# ---------------------------------------------------------------------------
# semantic mutation


def activation_sites(g: BoolGenome) -> list[tuple[int, int]]:
    """(slot, k) variable inputs of active nodes that may grow a child."""
    return [(s, k) for s in g.active() if g.can_branch(s) for k in range(2) if g.inputs[s, k] != g.n_vars]


def deactivation_sites(g: BoolGenome) -> list[tuple[int, int]]:
    """(slot, k) child references; one per non-root active node."""
    return [(s, k) for s in g.active() for k in range(2) if g.inputs[s, k] == g.n_vars]


def activate(g: BoolGenome, rng) -> bool:
    sites = activation_sites(g)
    if not sites:
        return False
    s, k = sites[int(rng.integers(len(sites)))]
    g.inputs[s, k] = g.n_vars
    fresh_node(g, 2 * s + 1 + k, rng)
    return True


def deactivate(g: BoolGenome, rng) -> bool:
    sites = deactivation_sites(g)
    if not sites:
        return False
    s, k = sites[int(rng.integers(len(sites)))]
    g.inputs[s, k] = rng.integers(g.n_vars)
    return True


def shuffle_variables(g: BoolGenome, rng, bias: str = "linear") -> None:
    """Reassign every variable input of the active tree, favouring rarely used variables.

    ``fewest`` draws uniformly among the variables with the lowest running use
    count; ``linear`` weights variable ``v`` by ``max(u) - u_v + 1``.
    """
    if bias not in VAR_BIASES:
        raise ValueError(f"unknown variable bias {bias!r}")
    uses = np.zeros(g.n_vars)
    for s in g.active():
        for k in range(2):
            if g.inputs[s, k] == g.n_vars:
                continue
            if bias == "fewest":
                w = (uses == uses.min()).astype(float)
            else:
                w = uses.max() - uses + 1
            v = int(rng.choice(g.n_vars, p=w / w.sum()))
            uses[v] += 1
            g.inputs[s, k] = v


def local_nl_bound(n: int, k: int) -> int:
    """Largest nonlinearity, over n variables, of a function of only ``k`` of them.

    Uses the bent-style value ``2^(k-1) - 2^(ceil(k/2)-1)`` on the k-variable
    space, scaled by ``2^(n-k)``.
    """
    if k < 1:
        return 0
    return (1 << (n - k)) * ((1 << (k - 1)) - (1 << ((k + 1) // 2 - 1)))


def flip_probabilities(g: BoolGenome, bound: str = "local") -> dict[int, float]:
    """Per active slot ``1 - nl / max_nl`` clamped to [0, 1]; 1 when ``max_nl`` is 0."""
    if bound not in OP_BOUNDS:
        raise ValueError(f"unknown op bound {bound!r}")
    nls = node_nonlinearities(g)
    if bound == "local":
        counts = node_variable_counts(g)
        limits = {s: local_nl_bound(g.n_vars, counts[s]) for s in nls}
    else:
        full = bent_bound(g.n_vars)
        limits = {s: full for s in nls}
    return {s: 1.0 if limits[s] == 0 else min(1.0, max(0.0, 1.0 - nls[s] / limits[s])) for s in nls}


def shuffle_operators(g: BoolGenome, rng, bound: str = "local") -> None:
    for s, p in flip_probabilities(g, bound).items():
        if rng.random() < p:
            g.ops[s] ^= 1


def mutate_semantic(g: BoolGenome, rng, var_bias: str = "linear", op_bound: str = "local") -> BoolGenome:
    """Fair coin between structure and function, then a fair coin between the two actions.

    Structure: activate (grow a fresh node on a variable input) or
    deactivate (replace a child reference by a variable); each falls back to
    the other when it has no site.  Function: shuffle variables or shuffle
    operators.
    """
    g = g.copy()
    if rng.integers(2) == 0:
        if rng.integers(2) == 0:
            activate(g, rng) or deactivate(g, rng)
        else:
            deactivate(g, rng) or activate(g, rng)
    elif rng.integers(2) == 0:
        shuffle_variables(g, rng, var_bias)
    else:
        shuffle_operators(g, rng, op_bound)
    return g


def mutator(
    operator: str,
    mr: float,
    mc: int,
    spawn_p=SPAWN_P,
    var_bias: str = "linear",
    op_bound: str = "local",
) -> Callable[[BoolGenome, np.random.Generator], BoolGenome]:
    if operator == "uniform":
        return lambda g, rng: mutate_uniform(g, mr, rng, spawn_p)
    if operator == "point":
        return lambda g, rng: mutate_point(g, mc, rng, spawn_p)
    if operator == "single":
        return lambda g, rng: mutate_single(g, rng, spawn_p)
    if operator == "semantic":
        return lambda g, rng: mutate_semantic(g, rng, var_bias, op_bound)
    raise ValueError(f"unknown operator {operator!r}; expected one of {OPERATORS}")
