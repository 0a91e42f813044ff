"""Restricted root polytopes, the eta linearization and boundary slices for classical real forms."""

from . import agpoly, errors, jordan, matrealize, rootsys, sl2model, sl2slice
from .agpoly import AGPolytope, BoundaryStratum, Kind
from .errors import AGError
from .jordan import JordanParts, lift_jordan, multiplicative_jordan
from .matrealize import RealFormRealization, RealLinearAutomorphism, eta, load_real_form
from .rootsys import FormLabel, RestrictedRootSystem, restricted_root_data
from .sl2slice import Sl2Triple, construct_slice

__version__ = "0.1.0"

__all__ = [
    "AGError", "AGPolytope", "BoundaryStratum", "FormLabel", "JordanParts", "Kind",
    "RealFormRealization", "RealLinearAutomorphism", "RestrictedRootSystem", "Sl2Triple",
    "agpoly", "construct_slice", "errors", "eta", "jordan", "lift_jordan", "load_real_form",
    "matrealize", "multiplicative_jordan", "restricted_root_data", "rootsys", "sl2model", "sl2slice",
]
