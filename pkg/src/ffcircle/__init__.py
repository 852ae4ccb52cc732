"""Exact arithmetic laboratory for the circle method over F_q(T).

Counting functions for solutions of a smooth form along polynomial
curves, exponential-sum identities on the Laurent-tail torus, arc
decompositions, freeness censuses, lattice point counts and height
counting weighted by freedom, all at concrete finite parameters with
no floating point in any result.
"""

__version__ = "0.1.0"
