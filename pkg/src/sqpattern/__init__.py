"""Square-pattern point counts for polynomial systems over finite fields."""

from .counting import (
    BoundSpec,
    CountReport,
    ErrorSeries,
    ExponentFit,
    PatternSpec,
    PolySystem,
    build_variety,
    character_histogram,
    count_all_patterns,
    count_pattern,
    count_pattern_affine,
    count_pattern_projective,
    count_variety_direct,
    count_variety_fiber,
    error_report,
    fit_exponent,
    main_term_affine,
    main_term_pair,
    main_term_projective,
    pattern_from_variety,
)
from .errors import (
    CalibrationError,
    CeilingExceeded,
    InvariantViolation,
    ParseError,
    SqpatternError,
)
from .ff import FieldElement, FieldSpec, element, embed, find_nonsquare, make_field, quadratic_character
from .geometry import (
    PointClass,
    SingularProfile,
    WitnessCertificate,
    WitnessReport,
    calibrate_constant,
    check_condition_i_quadratic_pair,
    check_condition_iii,
    classify_point_conic,
    classify_point_quadric_character,
    count_external_internal,
    count_T_points,
    estimate_dimension,
    sigma_profile,
    tangent_count,
)
from .poly import GramMatrix, Poly, gram_matrix, matrix_rank
from .polyparse import parse_poly
from .sysfile import SystemFile, load_system, parse_system
from .verify import VerificationVerdict, cmd_classify, cmd_count, cmd_sweep, cmd_verify

__version__ = "0.1.0"
