"""wittlab: a workbench for quadratic modules over finite rings.

Exhaustively verifies, at desk scale, the constructive substrate behind
stability for automorphism groups of modules and quadratic modules: stable
ranks, block reduction, hyperbolic straightening, transitivity and
cancellation, and the connectivity of the unimodular/isotropic/hyperbolic
sequence posets.
"""

__version__ = "0.1.0"
