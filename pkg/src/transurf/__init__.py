"""Exact computations on translation surfaces and the X_n family."""

from .exactfield import FieldElement, NumberField, define_field
from .family import build_origami6, build_xn, origami_cusps, theta_report, theta_vector, verify_xn
from .flatsurf import TranslationSurface, make_surface, stratum, validate
from .flow import classify_configuration, decompose, enumerate_cp_directions
from .invariants import certify_direction, saf_direction

__version__ = "0.1.0"

__all__ = [
    "FieldElement", "NumberField", "define_field", "build_origami6", "build_xn", "origami_cusps",
    "theta_report", "theta_vector", "verify_xn", "TranslationSurface", "make_surface", "stratum", "validate",
    "classify_configuration", "decompose", "enumerate_cp_directions", "certify_direction", "saf_direction",
]
