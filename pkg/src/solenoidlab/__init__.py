"""Numerical laboratory for skew-product solenoidal attractors.

The system under study is T(x, y) = (b x mod 1, gamma y + phi(x)) with an
integer base b >= 2, contraction 0 < gamma < 1, and a periodic trigonometric
polynomial phi.  The package builds the fiber measures addressed by digit
words, estimates dimensions via multiscale b-adic entropy and box counting,
and runs numeric scans for degeneracy, exponential separation, entropy
porosity, transversality, and partition entropy limits.
"""

from .dynamics import OrbitSample, attractor_points, iterate_T
from .entropy import (
    EntropyProfile,
    GrowthRecord,
    PorosityReport,
    cond_entropy,
    dimension_estimate,
    entropy,
    entropy_growth_experiment,
    porosity_fraction,
)
from .fractal import (
    BoxCountResult,
    RasterGrid,
    WeierstrassGraph,
    attractor_box_count,
    box_count_dimension,
    box_count_graph,
    predicted_dimension,
    render_attractor,
    weierstrass_graph,
)
from .measures import (
    BAdicCell,
    ComponentMeasure,
    DiscreteMeasure,
    SelfSimilarityReport,
    build_mx_empirical,
    build_mx_exact,
    cell_of,
    component,
    convolve,
    mix,
    pushforward_affine,
    self_similarity_residual,
    total_variation,
)
from .partitions import (
    DecompositionReport,
    PartitionKey,
    ThetaEntropyRow,
    WordMeasure,
    decomposition_check,
    measure_A,
    measure_B,
    partition_key,
    separation_exponent,
    theta_entropy_table,
    theta_measure,
)
from .periodic import PeriodicFn, cohomological_phi, eval_deriv, sup_norm
from .separation import (
    GENERIC_BASE_POINT,
    DerivativeSeparation,
    DichotomyVerdict,
    SeparationScan,
    TransversalityCertificate,
    condition_H_scan,
    derivative_separation,
    exp_separation_scan,
    min_gap,
    transversality_search,
    validate_certificate,
)
from .series import SeriesValue, cocycle_check, eval_S, eval_S_deriv
from .words import SystemParams, Word, nhat, sample_words, word_point

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
