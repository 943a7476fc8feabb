"""Exact computations with tropical fans: Chow rings, Minkowski weights,
divisors, tropical modifications, Bergman fans of matroids, and verifiers
for Poincaré duality, Hard Lefschetz and the Hodge-Riemann relations.
"""

from .fan import Fan, build_fan, line_fan, point_fan, product, star_fan
from .balance import Weight, orientation, reduced_orientation

__all__ = [
    "Fan",
    "Weight",
    "build_fan",
    "line_fan",
    "point_fan",
    "product",
    "star_fan",
    "orientation",
    "reduced_orientation",
]
