"""Frolov lattice cubature with random dilations, random shifts and a smooth change of variables."""
from ._kernels import BACKEND
from .corpus import TestFunction, get as get_function
from .lattice import NodeSet, SupportBox, enumerate_nodes
from .matrix import FrolovMatrix, ScaledMatrix, frolov_matrix, scale, validate
from .polynomial import chebyshev_roots, frolov_poly, real_roots
from .rule import (EstimateResult, QuadratureSpec, frolov_deterministic, make_rng, q_transformed,
                   q_value, randomized_estimate)

__all__ = [
    "BACKEND", "TestFunction", "get_function", "NodeSet", "SupportBox", "enumerate_nodes",
    "FrolovMatrix", "ScaledMatrix", "frolov_matrix", "scale", "validate",
    "chebyshev_roots", "frolov_poly", "real_roots",
    "EstimateResult", "QuadratureSpec", "frolov_deterministic", "make_rng", "q_transformed",
    "q_value", "randomized_estimate",
]
__version__ = "0.1.0"
