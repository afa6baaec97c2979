"""Exact-arithmetic toolkit for multidimensional convolutional codes.

Codes are submodules of F_p[z_1,...,z_m]^n; the package provides the
finite-field polynomial algebra, module computations (Groebner bases,
syzygies, parity checks, freeness), the code/behavior duality over truncated
power-series boxes, minimal first-order representations for one-variable
codes, and trellis-based distance computation and Viterbi decoding.
"""

__version__ = "0.1.0"

from .behavior import (
    BehaviorRep,
    TruncatedSeries,
    apply_matrix,
    dual_of_code,
    f_pairing,
    pairing,
    scalar_action,
    shift_L,
    to_kernel_rep,
    truncated_kernel,
)
from .code import (
    Code,
    Codeword,
    analyze,
    bounded_distance,
    correction_radius,
    coset_leader_decode,
    distance,
    encode,
    hamming_distance,
    syndrome,
    weight,
)
from .duality import duality_property_suite
from .field import FieldElement, FieldSpec, field_arith
from .firstorder import (
    KlmRep,
    PqrRep,
    degree,
    realize_KLM,
    realize_PQR,
    transform_KLM,
    transform_PQR,
    verify_KLM,
    verify_PQR,
)
from .modengine import (
    ModuleBasis,
    VerificationError,
    groebner,
    is_free,
    module_equal,
    normal_form,
    parity_check,
    syzygies,
)
from .poly import Monomial, ParseError, PolyError, Polynomial, Ring, parse_poly, poly_gcd, render_poly, ring, shift_mul
from .polymat import (
    ColumnDegreeProfile,
    PolyMatrix,
    column_reduce,
    hermite_form,
    is_minor_prime,
    is_unimodular,
    minors,
    rank_ff,
    row_reduce,
    smith_form,
)
from .trellis import (
    ChannelSpec,
    ResourceGuardError,
    StateGraph,
    build_state_graph,
    free_distance,
    simulate,
    viterbi_decode,
)
