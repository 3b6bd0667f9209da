"""Verification toolkit for the degree-3 rational map from E^3 to the threefold V33."""

from .finite_field import FieldElement, PrimeField
from .groebner import GroebnerBasis, MonomialOrder, buchberger, normal_form
from .modular import F2, F4, EtaProductSpec, QSeries, eta_expand
from .polynomial import MapSpec, MultiPoly, PolyRing, pullback
from .rational_map import affine_map, fiber, fiber_census, forward, homogenize_map
from .varieties import E, V33, count_E, count_E3, count_V33, cube_sum_table, enumerate_points

__version__ = "0.1.0"
