"""Numerical determinant-line gerbe calculator on finite unitary groups."""

from .errors import (
    AmbiguousClusterError,
    BoundaryError,
    BranchCutError,
    DimensionError,
    EmptySpaceError,
    EvaluationError,
    GapError,
    GerbeError,
    IllConditionedCutError,
    IncomparableError,
    RealignmentError,
    RegularityError,
    SamplingError,
    SchemaError,
    StepTooLargeError,
    UnsupportedOrderError,
)
from .linalg import (
    SpectralDecomposition,
    TangentVector,
    UnitaryMatrix,
    embed_block,
    embed_tangent,
    matrix_from_json,
    matrix_to_json,
    random_unitary,
    spectral_decompose,
    tangent_random,
    unitary_check,
)
from .contour import (
    Contour,
    CutCirclePoint,
    arc_contour,
    circle_between,
    circle_gt,
    cut_point,
    log_cut,
    quad_integrate,
    residue_eval,
    spectrum_contour,
)
from .projectors import (
    ArcContext,
    ArcEigenspace,
    Classification,
    arc_basis,
    arc_projector,
    classify,
    projector_derivative,
    single_projector_derivative,
)
from .fibers import (
    DetLineElement,
    TripleSectionValue,
    associativity_check,
    canonical_scalar,
    random_element,
    conjugate_fiber,
    dual_pairing,
    fiber_element,
    gerbe_product,
    same_element,
    section_value,
    swap_transport,
    weyl_line_map,
)
from .forms import (
    FormPoint,
    basic_three_form,
    connection_curvature_fd,
    connection_one_form,
    curvature_via_contour,
    curvature_via_projectors,
    curving_eval,
    delta_pairs,
    exterior_derivative_fd,
    projector_inserted_curvature,
    mc_form,
    three_curvature,
    wedge_trace_eval,
)
from .weyl import (
    FlagTangent,
    FlagTorusPoint,
    flag_point_from_json,
    flag_point_to_json,
    mc_pullback,
    preimage_count,
    pullback_curving_closed,
    pullback_df_closed,
    pullback_nu_closed,
    random_flag_tangent,
    sample_regular,
    weyl_apply,
    weyl_tangent,
)

__version__ = "0.1.0"
