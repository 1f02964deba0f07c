"""Single-shot interference measurements of a complex-valued target and
its level-wise reconstruction in refinable spline spaces.

The pipeline: build a dyadic sampling lattice over a region of interest,
attach measurement triples (axis steps or radial scalings), simulate the
squared-magnitude interference of the unknown target with a known reference
wave, recover the target pointwise from intensity differences via 2x2
solves, and synthesise a spline expansion whose L2 error decays dyadically
in the level.
"""
from __future__ import annotations

from .errors import (
    ArtifactError,
    CertificateError,
    ConfigurationError,
    DegeneratePointError,
    InadmissibleLevelError,
    MixedLevelError,
    ShapeError,
    SingularPointError,
    ZeroInLatticeError,
)
from .lattice import (
    LatticeSet,
    Roi,
    TripleSet,
    ZeroExclusion,
    build_lattice,
    build_triples,
    zero_excluded,
)
from .measure import (
    IntensityRecord,
    intensity,
    perturb_intensities,
    quasi_intensities,
    read_intensity_csv,
    sample_intensities,
    write_intensity_csv,
)
from .recover import (
    RecoveredSamples,
    SolveCoefficients,
    read_samples_csv,
    recover_level,
    solve_point,
    write_samples_csv,
)
from .reconstruct import (
    LevelSummary,
    StudyReport,
    convergence_study,
    exact_samples,
    fit_decay,
    l2_error,
    summary_json,
    synthesize,
    synthesize_grid,
    write_report_csv,
    write_summary_json,
)
from .refinable import (
    Mask1D,
    RefinableFunction,
    bspline_fourier_transform,
    bspline_mask,
    check_nonnegativity_condition,
    convolve_masks,
    eval_bspline,
    eval_refinable,
    mask_symbol,
    mask_symbol_derivative,
    sum_rule_order,
    tensor_bspline,
    unit_partition_residual,
)
from .targets import TargetFunction, builtin_target
from .waves import (
    AdmissibilityReport,
    PlaneWave,
    SphericalCertificate,
    SphericalWave,
    WaveSequence,
    admissibility_ratio,
    eval_wave,
    mu,
    plane_certificate,
    plane_design,
    spherical_certificate,
    spherical_design,
    try_certificate,
)

__version__ = "0.1.0"
