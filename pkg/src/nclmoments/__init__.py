"""Moment-matrix nonclassicality tests and homodyne-correlation simulation.

The package decides nonclassicality of single-mode bosonic states from
normally ordered moments (determinant hierarchies, scalar witnesses and
Bochner determinants of the characteristic function), simulates three
correlation-measurement layouts that would produce those moments in the
laboratory, and constructs amplitude-squared squeezed states together
with an independent closed-form moment oracle for them.
"""

from .criteria import (
    BasisKind,
    BochnerResult,
    CriterionReport,
    DEFAULT_TOLERANCE,
    MomentMatrix,
    MonomialBasis,
    asq_min_max,
    asq_variance,
    bochner_det,
    bochner_search,
    build_matrix,
    build_matrix_d2,
    determinant_hierarchy,
    graded_pairs,
    principal_minor,
    s2_witnesses,
    s3,
)
from .errors import (
    DimensionError,
    DuplicatePointError,
    InsufficientOrderError,
    NclError,
    NumericConsistencyError,
    OrderAccuracyWarning,
    SingularInversionError,
    TruncationError,
    ValidationError,
    WeakOscillatorWarning,
)
from .hermite import HermiteOracle, ass_moment_analytic, ass_oracle, gegenbauer_c_m_sq
from .measurement import (
    DetectionRecord,
    FourierRecord,
    LOConfig,
    add_shot_noise,
    scheme_a_forward,
    scheme_a_invert,
    scheme_a_phases,
    scheme_a_sample_and_fourier,
    scheme_b_extract,
    scheme_b_forward,
    scheme_c_extract,
    scheme_c_forward,
)
from .moments import (
    MomentTable,
    NormalPolynomial,
    as_real,
    char_function,
    moment_aa,
    moment_table,
    quad_moment,
    resolve_table,
    xn_moment,
)
from .states import (
    AssParams,
    DensityState,
    FockState,
    apply_squeeze,
    ass_params,
    make_ass_state,
    make_coherent,
    make_fock,
    make_thermal,
    q_function,
)

__all__ = [
    "AssParams",
    "BasisKind",
    "BochnerResult",
    "CriterionReport",
    "DEFAULT_TOLERANCE",
    "DensityState",
    "DetectionRecord",
    "DimensionError",
    "DuplicatePointError",
    "FockState",
    "FourierRecord",
    "HermiteOracle",
    "InsufficientOrderError",
    "LOConfig",
    "MomentMatrix",
    "MomentTable",
    "MonomialBasis",
    "NclError",
    "NormalPolynomial",
    "NumericConsistencyError",
    "OrderAccuracyWarning",
    "SingularInversionError",
    "TruncationError",
    "ValidationError",
    "WeakOscillatorWarning",
    "add_shot_noise",
    "apply_squeeze",
    "asq_min_max",
    "asq_variance",
    "ass_moment_analytic",
    "ass_oracle",
    "ass_params",
    "bochner_det",
    "bochner_search",
    "build_matrix",
    "build_matrix_d2",
    "char_function",
    "determinant_hierarchy",
    "gegenbauer_c_m_sq",
    "graded_pairs",
    "make_ass_state",
    "make_coherent",
    "make_fock",
    "make_thermal",
    "moment_aa",
    "moment_table",
    "principal_minor",
    "q_function",
    "quad_moment",
    "as_real",
    "resolve_table",
    "s2_witnesses",
    "s3",
    "scheme_a_forward",
    "scheme_a_invert",
    "scheme_a_phases",
    "scheme_a_sample_and_fourier",
    "scheme_b_extract",
    "scheme_b_forward",
    "scheme_c_extract",
    "scheme_c_forward",
    "xn_moment",
]

__version__ = "0.1.0"
