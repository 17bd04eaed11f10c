"""Color Hecke R-matrices over abelian gradings: construction and numerical verification."""

from .braiding import (
    build_anyonic,
    build_color_hecke,
    build_color_swap,
    build_multiparameter,
    build_super_r,
    check_hecke,
    check_qybe,
)
from .calculus import build_bcf, check_consistency, check_emitted_against_display, emit_relations
from .errors import InvalidInputError, NumericalError
from .grading import (
    CommutationFactor,
    GradingGroup,
    add,
    eval_factor,
    factor_from_exponents,
    factor_from_omega,
    factor_supercommutation,
    factor_trivial,
    is_even_factor,
    parity,
)
from .linop import (
    GradedBasis,
    TensorOperator,
    block_of,
    compose,
    flip_op,
    identity_op,
    op_distance,
    place_on_legs,
)
from .superize import build_rdelta, check_reduction, compute_cocycle, z2_regrade

__version__ = "0.1.0"
