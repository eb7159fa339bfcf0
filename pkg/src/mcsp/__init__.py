"""Exact solver for Minimum Common String Partition on unbalanced strings."""

from .csp import BlockDecomposition, blocks_of, validate_csp
from .instance import Instance, Marker, build_index, parse_instance
from .oracle import oracle_minimum
from .reduction import reduce_fixpoint
from .solver import SolverOptions, solve_decision, solve_minimum

__all__ = [
    "BlockDecomposition",
    "Instance",
    "Marker",
    "SolverOptions",
    "blocks_of",
    "build_index",
    "oracle_minimum",
    "parse_instance",
    "reduce_fixpoint",
    "solve_decision",
    "solve_minimum",
    "validate_csp",
]
