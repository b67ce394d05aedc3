"""Exact computation of Grothendieck-Witt classes and local A1-degrees.

The package provides an exact field tower (Q, odd prime fields, simple
extensions, rational functions, truncated Puiseux series), sparse
multivariate polynomials, Grothendieck-Witt ring arithmetic with
invariants and transfers, zero-dimensional local algebras with a Nakayama
stabilisation certificate, local A1-degrees (simple-zero, EKL and Bezout
routes), A1-Milnor numbers and node types, and Newton lifting of
critical-point branches over truncated Puiseux series.
"""

from .errors import A1Error, MathError, UsageError
from .fields import (
    QQ,
    FieldElement,
    PrimeField,
    PuiseuxSeriesField,
    RationalFunctionField,
    SimpleExtension,
    SquareClass,
    enumerate_elements,
    field_trace,
    is_square,
    square_class,
)
from .poly import (
    Polynomial,
    gradient,
    hessian_determinant,
    jacobian_determinant,
    parse,
)
from .gw import (
    BilinearForm,
    GwElement,
    diagonalize,
    from_diagonal,
    gw_equal,
    hyperbolic,
    invariants,
    springer_residues,
    transfer,
)
from .localalg import LocalAlgebra, local_quotient
from .degree import (
    bezout_form_p1,
    bezout_matrix,
    ekl_form,
    global_degree_finite_field,
    global_degree_p1,
    local_degree_ekl,
    local_degree_simple,
)
from .milnor import classify_point, milnor_number, node_type, verify_linear_family
from .puiseux import Branch, branch_type, newton_lift, verify_bifurcation

__version__ = "0.1.0"

__all__ = [
    "A1Error", "MathError", "UsageError",
    "QQ", "FieldElement", "PrimeField", "PuiseuxSeriesField",
    "RationalFunctionField", "SimpleExtension", "SquareClass",
    "enumerate_elements", "field_trace", "is_square", "square_class",
    "Polynomial", "gradient", "hessian_determinant", "jacobian_determinant",
    "parse",
    "BilinearForm", "GwElement", "diagonalize", "from_diagonal", "gw_equal",
    "hyperbolic", "invariants", "springer_residues", "transfer",
    "LocalAlgebra", "local_quotient",
    "bezout_form_p1", "bezout_matrix", "ekl_form",
    "global_degree_finite_field", "global_degree_p1",
    "local_degree_ekl", "local_degree_simple",
    "classify_point", "milnor_number", "node_type", "verify_linear_family",
    "Branch", "branch_type", "newton_lift", "verify_bifurcation",
    "__version__",
]
