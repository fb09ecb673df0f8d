"""Genetic programming search for bent Boolean functions."""

from .genome import BoolGenome, Node, eval_genome, fitness, init_genome, node_nonlinearities
from .operators import OPERATORS, mutate_point, mutate_semantic, mutate_single, mutate_uniform
from .search import BentParams, BentRun, bent_experiment, evolve_bent
from .walsh import bent_bound, fwht, nonlinearity, walsh_spectrum

__all__ = [
    "BoolGenome", "Node", "eval_genome", "fitness", "init_genome", "node_nonlinearities",
    "OPERATORS", "mutate_point", "mutate_semantic", "mutate_single", "mutate_uniform",
    "BentParams", "BentRun", "bent_experiment", "evolve_bent",
    "bent_bound", "fwht", "nonlinearity", "walsh_spectrum",
]
