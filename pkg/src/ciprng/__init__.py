"""Chaotic-iteration pseudo-random generators and their analysis tools."""

__version__ = "0.1.0"

from .bitcore import BooleanFunction, Configuration, Strategy, builtin_function, iterate_G, neighbor, step_F
from .graphgen import (GenerationParams, IterationGraph, are_isomorphic, build_graph, dedup_functions,
                       function_from_graph, generate_scc_function, is_strongly_connected)
from .markov import deviation_rate, reach_distribution, relative_deviation, sufficient_iterations, transition_matrix
from .prng import CiGenerator, LegacyGenerator, bitstream, ci_round, legacy_round, reallocate, sample
from .stattests import pt_meta, repartition, run_battery
from .xorshift import XorShift32, XorshiftState, seed_from_time

__all__ = [
    "BooleanFunction", "Configuration", "Strategy", "builtin_function", "iterate_G", "neighbor", "step_F",
    "GenerationParams", "IterationGraph", "are_isomorphic", "build_graph", "dedup_functions",
    "function_from_graph", "generate_scc_function", "is_strongly_connected",
    "deviation_rate", "reach_distribution", "relative_deviation", "sufficient_iterations", "transition_matrix",
    "CiGenerator", "LegacyGenerator", "bitstream", "ci_round", "legacy_round", "reallocate", "sample",
    "pt_meta", "repartition", "run_battery",
    "XorShift32", "XorshiftState", "seed_from_time",
]
