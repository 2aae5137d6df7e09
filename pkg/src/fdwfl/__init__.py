"""Frequency-domain fundamental lemma for finite-record (non-steady-state) data."""
from .spectra import (
    FrequencyGrid,
    PeReport,
    Spectrum,
    build_F,
    build_Psi,
    check_pe,
    dft,
    inverse_dft,
    make_grid,
    phasor_spectrum,
    realify_Psi,
    record_dft,
    stack_spectra,
    window_vector,
)
from .lti import (
    EigenvalueError,
    IoSpectrumData,
    StateSpaceModel,
    Trajectory,
    augment,
    experiment_to_spectrum,
    is_controllable,
    observability_index,
    observability_matrix,
    simulate,
    transfer_function,
    transient,
)
from .wfl import (
    MembershipSolution,
    generate_trajectory,
    membership_steady,
    membership_transient,
    rank_certificate,
)
from .frfeval import (
    EvalResult,
    StructuredSvd,
    estimate_noisy,
    evaluate_frf,
    evaluate_joint,
    evaluate_transient,
    rank_heuristic_check,
    structured_svd,
)
from .bench import (
    CaseStudyReport,
    ExperimentConfig,
    benchmark_model,
    run_experiment,
    run_noisefree_case_study,
    run_noisy_case_study,
)

__version__ = "0.1.0"
