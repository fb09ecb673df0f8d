"""Tree genomes over {AND, XOR} stored as a fixed chromosome.

A genome of depth limit ``d`` owns ``2^d - 1`` node slots laid out as a
binary heap: slot ``s`` sits at depth ``bit_length(s + 1)`` (root = depth 1)
and its two possible children are slots ``2s + 1`` and ``2s + 2``.  Every
slot carries three genes, an operator and two inputs.  An input holds a
variable index ``0..n-1`` or the marker ``CHILD == n``, meaning "read the
child slot".  Slots in the bottom layer may only read variables.

Only slots reachable from the root through ``CHILD`` inputs are *active*;
the rest are dormant genes that still exist in the chromosome.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numba
import numpy as np

from . import walsh

AND, XOR = 0, 1
OP_NAMES = ("AND", "XOR")


class Var(NamedTuple):
    index: int


class Child(NamedTuple):
    slot: int


class Node(NamedTuple):
    slot: int
    depth: int
    op: int
    in1: Var | Child
    in2: Var | Child


def slot_depth(slot: int) -> int:
    return (int(slot) + 1).bit_length()


def child_slot(slot: int, k: int) -> int:
    return 2 * int(slot) + 1 + k


class BoolGenome:
    def __init__(self, n_vars: int, depth_limit: int, ops: np.ndarray, inputs: np.ndarray):
        self.n_vars = n_vars
        self.depth_limit = depth_limit
        self.ops = ops  # (slots,) int8
        self.inputs = inputs  # (slots, 2) int64, value n_vars marks a child

    @property
    def CHILD(self) -> int:
        return self.n_vars

    @property
    def slots(self) -> int:
        return len(self.ops)

    def copy(self) -> "BoolGenome":
        return BoolGenome(self.n_vars, self.depth_limit, self.ops.copy(), self.inputs.copy())

    def can_branch(self, slot: int) -> bool:
        return slot_depth(slot) < self.depth_limit

    def active(self) -> list[int]:
        """Active slots in pre-order (left subtree first)."""
        return _active(self.inputs, self.n_vars).tolist()

    def node(self, slot: int) -> Node:
        def ref(k):
            x = int(self.inputs[slot, k])
            return Child(child_slot(slot, k)) if x == self.n_vars else Var(x)

        return Node(slot, slot_depth(slot), int(self.ops[slot]), ref(0), ref(1))

    def nodes(self) -> list[Node]:
        return [self.node(s) for s in self.active()]

    @property
    def size(self) -> int:
        return len(self.active())

    @property
    def depth(self) -> int:
        return max(slot_depth(s) for s in self.active())

    def signature(self):
        """Nested tuple of the active expression; equal signatures mean equal phenotypes."""

        def rec(s):
            args = []
            for k in range(2):
                x = int(self.inputs[s, k])
                args.append(rec(2 * s + 1 + k) if x == self.n_vars else x)
            return (int(self.ops[s]), *args)

        return rec(0)

    def validate(self) -> None:
        n, d = self.n_vars, self.depth_limit
        if n < 2 or d < 1:
            raise ValueError("need n_vars >= 2 and depth_limit >= 1")
        size = (1 << d) - 1
        if self.ops.shape != (size,) or self.inputs.shape != (size, 2):
            raise ValueError(f"chromosome must have {size} slots")
        if not np.isin(self.ops, (AND, XOR)).all():
            raise ValueError("operator genes must be AND or XOR")
        if self.inputs.min() < 0 or self.inputs.max() > n:
            raise ValueError("input gene out of range")
        bottom = self.inputs[(1 << (d - 1)) - 1:]
        if (bottom == n).any():
            raise ValueError("bottom-layer nodes may only read variables")

    def __repr__(self):
        def show(sig):
            if isinstance(sig, tuple):
                return f"{OP_NAMES[sig[0]]}({show(sig[1])}, {show(sig[2])})"
            return f"x{sig}"

        return f"BoolGenome(n={self.n_vars}, d={self.depth_limit}, {show(self.signature())})"


def empty_genome(n_vars: int, d: int) -> BoolGenome:
    size = (1 << d) - 1
    return BoolGenome(n_vars, d, np.zeros(size, np.int8), np.zeros((size, 2), np.int64))


def from_expr(n_vars: int, d: int, expr) -> BoolGenome:
    """Build a genome from ``("and"|"xor", a, b)`` tuples with int leaves.

    Dormant slots get ``AND(x0, x1)``.
    """
    g = empty_genome(n_vars, d)
    g.inputs[:, 1] = 1

    def put(s, e):
        if slot_depth(s) > d:
            raise ValueError("expression deeper than the depth limit")
        name, a, b = e
        g.ops[s] = OP_NAMES.index(name.upper())
        for k, x in enumerate((a, b)):
            if isinstance(x, tuple):
                g.inputs[s, k] = n_vars
                put(2 * s + 1 + k, x)
            else:
                if not 0 <= x < n_vars:
                    raise ValueError(f"variable {x} out of range")
                g.inputs[s, k] = x

    if not isinstance(expr, tuple):
        raise ValueError("the root must be an operator node")
    put(0, expr)
    g.validate()
    return g


def init_genome(n_vars: int, d: int, rng: np.random.Generator, shape: str = "single") -> BoolGenome:
    """Random genome.

    ``shape="single"``: one active root with a random op and two distinct
    variables.  ``shape="full"``: every slot above the bottom layer reads
    both children, giving a complete tree of depth ``d`` whose bottom nodes
    read uniformly random variables.  Dormant slots always hold a random op
    and random variables.
    """
    if n_vars < 2 or d < 1:
        raise ValueError("need n_vars >= 2 and d >= 1")
    if shape not in ("single", "full"):
        raise ValueError(f"unknown initial shape {shape!r}")
    size = (1 << d) - 1
    ops = rng.integers(0, 2, size=size).astype(np.int8)
    inputs = rng.integers(0, n_vars, size=(size, 2)).astype(np.int64)
    g = BoolGenome(n_vars, d, ops, inputs)
    if shape == "single":
        g.inputs[0] = rng.choice(n_vars, 2, replace=False)
    else:
        g.inputs[: (1 << (d - 1)) - 1] = n_vars
    return g


# ---------------------------------------------------------------------------
# evaluation


@lru_cache(maxsize=None)
def _masks(n: int) -> np.ndarray:
    m = walsh.packed_variable_masks(n)
    m.setflags(write=False)
    return m


@numba.njit(cache=True)
def _eval_slots(ops, inputs, masks, out):
    n = masks.shape[0]
    for s in range(ops.shape[0] - 1, -1, -1):
        a = out[2 * s + 1] if inputs[s, 0] == n else masks[inputs[s, 0]]
        b = out[2 * s + 2] if inputs[s, 1] == n else masks[inputs[s, 1]]
        if ops[s] == 0:
            for w in range(masks.shape[1]):
                out[s, w] = a[w] & b[w]
        else:
            for w in range(masks.shape[1]):
                out[s, w] = a[w] ^ b[w]


@numba.njit(cache=True)
def _active(inputs, n):
    out = np.empty(inputs.shape[0], np.int64)
    stack = np.empty(inputs.shape[0], np.int64)
    stack[0] = 0
    top, m = 1, 0
    while top:
        top -= 1
        s = stack[top]
        out[m] = s
        m += 1
        for k in (1, 0):
            if inputs[s, k] == n:
                stack[top] = 2 * s + 1 + k
                top += 1
    return out[:m]


@numba.njit(cache=True)
def _root_nl(ops, inputs, masks):
    out = np.empty((ops.shape[0], masks.shape[1]), np.uint64)
    _eval_slots(ops, inputs, masks, out)
    return walsh.nl_of_words(out[0], masks.shape[0])


def slot_tables(g: BoolGenome) -> np.ndarray:
    """(slots, words) packed truth tables of every slot's subfunction."""
    masks = _masks(g.n_vars)
    out = np.empty((g.slots, masks.shape[1]), np.uint64)
    _eval_slots(g.ops, g.inputs, masks, out)
    return out


def eval_genome(g: BoolGenome) -> np.ndarray:
    """Truth table of the root over all ``2^n`` inputs (uint8)."""
    return walsh.unpack_words(slot_tables(g)[0], g.n_vars)


def fitness(g: BoolGenome) -> int:
    return int(_root_nl(g.ops, g.inputs, _masks(g.n_vars)))


def node_nonlinearities(g: BoolGenome) -> dict[int, int]:
    """Nonlinearity of every active slot's subfunction over all n variables."""
    tables = slot_tables(g)
    return {s: int(walsh.nl_of_words(tables[s], g.n_vars)) for s in g.active()}


def node_variable_counts(g: BoolGenome) -> dict[int, int]:
    """Number of distinct variables read inside each active slot's subtree."""
    out = {}

    def rec(s):
        seen = set()
        for k in range(2):
            x = int(g.inputs[s, k])
            seen |= rec(2 * s + 1 + k) if x == g.n_vars else {x}
        out[s] = len(seen)
        return seen

    rec(0)
    return out


def naive_truth_table(g: BoolGenome) -> np.ndarray:
    """Per-input recursive interpreter; slow, used as a test oracle."""
    n = g.n_vars

    def value(s, bits):
        vals = []
        for k in range(2):
            x = int(g.inputs[s, k])
            vals.append(value(2 * s + 1 + k, bits) if x == n else bits[x])
        return vals[0] & vals[1] if g.ops[s] == AND else vals[0] ^ vals[1]

    table = np.empty(1 << n, np.uint8)
    for x in range(1 << n):
        bits = [(x >> (n - 1 - v)) & 1 for v in range(n)]
        table[x] = value(0, bits)
    return table
