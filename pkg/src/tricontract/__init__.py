"""Exact analysis of self-maps that contract perimeters of triangles."""
from .contraction_analysis import (ContractionReport, MValueResult, classify, image_perimeter, m_value,
                                   perimeter, petrov_ratio, weak_ratio)
from .metric_core import (FiniteMetricSpace, PointId, Rational, SelfMap, ValidationReport, parse_rational,
                          random_map, random_space, render_rational, validate_metric)

__all__ = [
    "ContractionReport", "FiniteMetricSpace", "MValueResult", "PointId", "Rational", "SelfMap",
    "ValidationReport", "classify", "image_perimeter", "m_value", "parse_rational", "perimeter",
    "petrov_ratio", "random_map", "random_space", "render_rational", "validate_metric", "weak_ratio",
]
