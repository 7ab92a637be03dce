"""orkit: rectifier-circuit complexity toolkit.

Explicit k-free matrix families (distance graphs on F_p^3, norm graphs on
F_{q^t}), the pair transform and its rectangle statistics, rectifier
circuits as DAGs with an exact depth-3 construction for the complement of
the transform, certified lower bounds, and a report pipeline tabulating
the complexity separation between matrices and their complements.
"""

from .errors import (
    BudgetExceededError,
    CountOverflowError,
    DimensionMismatchError,
    FieldOrderError,
    FormatError,
    NoFreeDeltaError,
    NonSquareError,
    NotKFreeError,
    NotPrimeError,
    OrkitError,
    TooLargeError,
)
from .finfield import FieldElement, FiniteField, is_prime, make_field
from .rng import SplitMix64
from .matrices import (
    BooleanMatrix,
    KFreeness,
    PairIndexer,
    RectangleStats,
    RectangleWitness,
    SpotCheckResult,
    brown_matrix,
    complement,
    count_2_rectangles,
    is_k_free,
    norm_matrix,
    pair_transform,
    random_k_free,
    random_matrix,
    read_matrix,
    spot_check_pair_transform_2_free,
    weight,
    write_matrix,
)
from .circuits import (
    RectifierCircuit,
    VerifyResult,
    depth3_complement_circuit,
    read_circuit,
    sampled_verify,
    trivial_circuit,
    write_circuit,
)
from .bounds import (
    Depth2Cover,
    Lemma1Certificate,
    LowerBoundCertificate,
    Or2Result,
    REPORT_CSV_HEADER,
    ReportRow,
    exact_or2,
    lemma1_certificate,
    nechiporuk_lower,
    report_csv_text,
    report_json_text,
    theorem_report,
)
from .plotting import render_report_figure

__version__ = "0.1.0"
