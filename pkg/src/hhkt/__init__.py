"""Hochschild cohomology of graded complete intersections over F_p.

Computes HH rings via Koszul-Tate resolutions, cross-checks them against a
window-truncated bar-complex oracle, and computes the BV operator on
Poincare duality (exterior) algebras with mechanical resolution of
filtration extension problems.
"""

__version__ = "0.1.0"
