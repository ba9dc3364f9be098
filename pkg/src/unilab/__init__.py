"""Unistochastic structure of 3x3 bistochastic matrices.

The sign of one quartic polynomial Q decides whether a bistochastic matrix
is unistochastic; this package decides it, reconstructs unitary witnesses,
samples the relevant measure families, evaluates the closed-form constants
and the |J| distribution, and cross-checks everything by Monte Carlo.
"""

from .analytic import (
    ABSJ_MAX,
    ClosedFormTable,
    SeriesEvaluation,
    b3_integral,
    b3_q_integrals,
    cdf_absj,
    cdf_absj_values,
    closed_form_table,
    density_absj,
    density_f12,
    digamma,
    gauss_2f1_onethird,
    h_k,
    likelihood_ratio_at,
    log_gamma,
    mean_entropy_mu,
    mean_generalized_entropy_b3,
    mean_generalized_entropy_mu,
    pochhammer,
    q_moments,
    volume_ratio,
)
from .core import (
    IDENTITY,
    MAX_BALL_RADIUS,
    NAMED_MATRICES,
    P,
    P2,
    P12,
    P13,
    P23,
    Q_CLASS_TOL,
    Q_MAX,
    Q_MIN,
    SCHUR,
    W,
    BistochasticMatrix,
    BVector,
    ExtremeQResult,
    MatrixClass,
    UnistochasticityVerdict,
    b_from_product_coords,
    birkhoff_b_volume,
    birkhoff_volume_triangulation,
    chain_link_feasible,
    classify,
    embedding_gram_determinant,
    embedding_gram_matrix,
    embedding_jacobian,
    entropy,
    entropy_values,
    extreme_q_search,
    feasible_b_mask,
    generalized_entropy,
    generalized_entropy_values,
    link_lengths,
    matrix_from_b,
    q_of,
    q_product_form,
    q_values,
    triangulation_simplex_volumes,
    x_interval,
)
from .estimators import (
    N_SUBSTREAMS,
    EmpiricalCdf,
    EstimateResult,
    Statistic,
    estimate_mean,
    ks_distance,
    moment_suite,
)
from .sampling import (
    DEFAULT_SEED,
    FLAT_B3,
    HAAR,
    MeasureSpec,
    RngStream,
    sample_b,
    sample_flat_b3,
    sample_haar_unitary,
    sample_mu_k,
    split_stream,
)
from .unitary import (
    AngleParams,
    NotUnistochasticError,
    ReconstructionResult,
    Unitary3,
    dephase_canonical,
    from_angles,
    jarlskog,
    jarlskog_from_angles,
    jarlskog_values,
    reconstruct,
    to_bistochastic,
)

__version__ = "0.1.0"

__all__ = [
    "ABSJ_MAX",
    "AngleParams",
    "BVector",
    "BistochasticMatrix",
    "ClosedFormTable",
    "DEFAULT_SEED",
    "EmpiricalCdf",
    "EstimateResult",
    "ExtremeQResult",
    "FLAT_B3",
    "HAAR",
    "IDENTITY",
    "MAX_BALL_RADIUS",
    "MatrixClass",
    "MeasureSpec",
    "N_SUBSTREAMS",
    "NAMED_MATRICES",
    "NotUnistochasticError",
    "P",
    "P12",
    "P13",
    "P2",
    "P23",
    "Q_CLASS_TOL",
    "Q_MAX",
    "Q_MIN",
    "ReconstructionResult",
    "RngStream",
    "SCHUR",
    "SeriesEvaluation",
    "Statistic",
    "Unitary3",
    "UnistochasticityVerdict",
    "W",
    "b3_integral",
    "b3_q_integrals",
    "b_from_product_coords",
    "birkhoff_b_volume",
    "birkhoff_volume_triangulation",
    "cdf_absj",
    "cdf_absj_values",
    "chain_link_feasible",
    "classify",
    "closed_form_table",
    "dephase_canonical",
    "density_absj",
    "density_f12",
    "digamma",
    "embedding_gram_determinant",
    "embedding_gram_matrix",
    "embedding_jacobian",
    "entropy",
    "entropy_values",
    "estimate_mean",
    "extreme_q_search",
    "feasible_b_mask",
    "from_angles",
    "gauss_2f1_onethird",
    "generalized_entropy",
    "generalized_entropy_values",
    "h_k",
    "jarlskog",
    "jarlskog_from_angles",
    "jarlskog_values",
    "ks_distance",
    "likelihood_ratio_at",
    "link_lengths",
    "log_gamma",
    "matrix_from_b",
    "mean_entropy_mu",
    "mean_generalized_entropy_b3",
    "mean_generalized_entropy_mu",
    "moment_suite",
    "pochhammer",
    "q_moments",
    "q_of",
    "q_product_form",
    "q_values",
    "reconstruct",
    "sample_b",
    "sample_flat_b3",
    "sample_haar_unitary",
    "sample_mu_k",
    "split_stream",
    "to_bistochastic",
    "triangulation_simplex_volumes",
    "volume_ratio",
    "x_interval",
]
