"""Free differential graded algebras over Q, Massey products and blow-up models."""

from .dga import (
    CohClass,
    DGAPresentation,
    cohomology,
    cup,
    decomposable_subspace,
    is_exact,
    tensor_product,
    validate,
)
from .gca import Element, GeneratorSpec, GradedAlgebra
from .massey import (
    ClassMatrix,
    DefiningSystem,
    UndefinedProduct,
    find_defining_system,
    matrix_triple_product,
    triple_product,
    verify_membership,
)
from .models import heisenberg, kodaira_thurston, sphere_model, witt_model
from .textio import parse_presentation, render

__all__ = [
    "ClassMatrix",
    "CohClass",
    "DGAPresentation",
    "DefiningSystem",
    "Element",
    "GeneratorSpec",
    "GradedAlgebra",
    "UndefinedProduct",
    "cohomology",
    "cup",
    "decomposable_subspace",
    "find_defining_system",
    "heisenberg",
    "is_exact",
    "kodaira_thurston",
    "matrix_triple_product",
    "parse_presentation",
    "render",
    "sphere_model",
    "tensor_product",
    "triple_product",
    "validate",
    "verify_membership",
    "witt_model",
]
