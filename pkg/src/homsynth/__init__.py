"""Monotone bounded-depth circuits for homomorphism and colorful-subgraph polynomials."""

from .circuit import ABP, Circuit, abp_to_circuit, evaluate, expand, metrics
from .decomp import PathDecomposition, RootedTreeDecomposition, attach_pendants, validate
from .errors import CapacityError, FormatError, HomsynthError, InputError
from .graphcore import Graph, parse_graph, prune
from .oracle import PolySpec, brute_polynomial, pit_equal
from .poly import SparsePolynomial, Var
from .synth import synth_abp, synth_circuit
from .widths import pw_delta, tw_delta

__version__ = "0.1.0"

__all__ = [
    "ABP",
    "CapacityError",
    "Circuit",
    "FormatError",
    "Graph",
    "HomsynthError",
    "InputError",
    "PathDecomposition",
    "PolySpec",
    "RootedTreeDecomposition",
    "SparsePolynomial",
    "Var",
    "abp_to_circuit",
    "attach_pendants",
    "brute_polynomial",
    "evaluate",
    "expand",
    "metrics",
    "parse_graph",
    "pit_equal",
    "prune",
    "pw_delta",
    "synth_abp",
    "synth_circuit",
    "tw_delta",
    "validate",
]
