"""Curvature operators of pseudo-Riemannian metrics, their real Jordan forms, and
seeded checks of Osserman / Ivanov-Petrova / Stanilov type properties."""

from .classifier import CheckConfig, PropertySpec, Verdict, check, check_suite_theorem
from .geometry import (
    ConformalScaling,
    ConstantCurvature,
    FamilyGF,
    HypersurfaceGf,
    ProductWithFlat,
    WarpedProduct,
    curvature_at,
    metric_at,
)
from .jordan import JordanType, jordan_type
from .polynomial import PolySpec
from .tensor_core import CurvatureTensor, InnerProduct

__all__ = [
    "CheckConfig", "PropertySpec", "Verdict", "check", "check_suite_theorem",
    "ConformalScaling", "ConstantCurvature", "FamilyGF", "HypersurfaceGf", "ProductWithFlat", "WarpedProduct",
    "curvature_at", "metric_at", "JordanType", "jordan_type", "PolySpec", "CurvatureTensor", "InnerProduct",
]
