"""ranklab: algebraic workbench for rank-metric decoding and MinRank.

Builds the minor-variable and bilinear modelings of rank-decoding and
MinRank instances, solves them by linearization at desk scale, verifies
the structural rank/dimension laws experimentally, and reproduces the
published bit-complexity tables for the corresponding attacks.
"""

from . import galois, matlin, instances, modelings, solver, hybrid, estimator

__all__ = ["galois", "matlin", "instances", "modelings", "solver",
           "hybrid", "estimator"]

__version__ = "0.1.0"
