"""Sparse integer polynomials with unbalanced coefficient sizes.

Interpolation and multiplication whose cost tracks the total bit-length
of the data rather than #terms times the largest coefficient.  The core
entry points are uinterpolate (recover a polynomial from a modular
derivative black box under bit-length and degree bounds) and
unbalanced_prod (multiply through interpolation with probabilistic
verification and an exact fallback).
"""

from .blackbox import (
    MBB,
    MDBB,
    BlackBoxContractError,
    EvalStats,
    SlpError,
    dump_slp,
    explicit_mbb,
    explicit_mdbb,
    mbb_to_mdbb,
    mdbb_image,
    parse_slp,
    prod_mdbb,
    slp_mbb,
    sum_mdbb,
)
from .interp import (
    CoeffClass,
    SliceParams,
    balanced_interpolate,
    coeff_class,
    round_div_away,
    slice_params,
    support_superset,
    uinterpolate,
    uinterpolate_slice,
    zero_test,
)
from .modring import (
    PruContext,
    build_pru,
    dft,
    geometric_eval,
    idft,
    integer_root_floor,
    random_prime,
)
from .mul import prod_bitlen_bound, unbalanced_prod, verif_prod
from .polycore import (
    CapacityError,
    SparsePoly,
    SpolyError,
    bitlen_int,
    bitlen_nat,
    bitlen_poly,
    dump_spoly,
    kronecker_mul,
    parse_spoly,
    schoolbook_mul,
    signed_lift,
    sparsity_bound,
)

__version__ = "0.1.0"

__all__ = [
    "MBB",
    "MDBB",
    "BlackBoxContractError",
    "CapacityError",
    "CoeffClass",
    "EvalStats",
    "PruContext",
    "SlpError",
    "SparsePoly",
    "SpolyError",
    "balanced_interpolate",
    "bitlen_int",
    "bitlen_nat",
    "bitlen_poly",
    "build_pru",
    "coeff_class",
    "dft",
    "dump_slp",
    "dump_spoly",
    "explicit_mbb",
    "explicit_mdbb",
    "geometric_eval",
    "idft",
    "integer_root_floor",
    "kronecker_mul",
    "mbb_to_mdbb",
    "mdbb_image",
    "parse_slp",
    "parse_spoly",
    "prod_bitlen_bound",
    "prod_mdbb",
    "random_prime",
    "round_div_away",
    "schoolbook_mul",
    "signed_lift",
    "SliceParams",
    "slice_params",
    "slp_mbb",
    "sparsity_bound",
    "sum_mdbb",
    "support_superset",
    "uinterpolate",
    "uinterpolate_slice",
    "unbalanced_prod",
    "verif_prod",
    "zero_test",
]
