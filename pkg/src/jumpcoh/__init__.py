"""Exact Dolbeault cohomology of tangent-valued forms on invariant models,
with obstruction calculus for jumping along deformations."""

from .cohomology import complex_cohomology, reduce_class
from .deformation import (
    DeformationMC,
    extend_class,
    export_twisted_complex,
    first_order_matrix,
    jump_report,
    kodaira_spencer,
    mc_check,
    obstruction_step,
)
from .errors import JumpcohError
from .forms import LieModel, TVForm, bracket, dbar
from .jetcomplex import JetModuleComplex, parse_complex
from .modelio import bundled_model, parse_class, parse_model, render_model
from .scalars import GaussianRational, Jet, ParamSet

__version__ = "0.1.0"

__all__ = [
    "GaussianRational",
    "Jet",
    "ParamSet",
    "LieModel",
    "TVForm",
    "bracket",
    "dbar",
    "complex_cohomology",
    "reduce_class",
    "JetModuleComplex",
    "parse_complex",
    "DeformationMC",
    "mc_check",
    "kodaira_spencer",
    "obstruction_step",
    "extend_class",
    "first_order_matrix",
    "export_twisted_complex",
    "jump_report",
    "parse_model",
    "render_model",
    "bundled_model",
    "parse_class",
    "JumpcohError",
]
