"""Exceptional points and quadrature dynamics of coupled mechanical modes."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AdiabaticValidityWarning,
    AmbiguousPhase,
    MagnoEPError,
    NoSignChange,
    NondegenerateModes,
    NotPseudoHermitian,
    ParseError,
    SerializationError,
    StepTooLarge,
    TooShort,
    ValidationError,
    ZeroDenominator,
)
from .model import (  # noqa: E402
    DynamicsMatrix,
    PhysicalParams,
    SymmetryClass,
    ThreeModeModel,
    TwoModeModel,
    check_pseudo_hermitian,
    dynamics_matrix,
    effective_rates,
    reduce_to_three_mode,
    reduce_to_two_mode,
    symmetry_class,
)
from .spectra import (  # noqa: E402
    ComplexEigenvalue,
    PhaseLabel,
    PhaseReport,
    Spectrum,
    classify_phase,
    eig2_closed_form,
    eig3,
    locate_ep,
    spectrum,
)
from .dynamics import (  # noqa: E402
    EnvelopeFit,
    GrowthClass,
    InitialState,
    Trajectory,
    closed_form_two_mode,
    fit_envelope,
    integrate,
    matrix_exponential_oracle,
    max_step,
)
from .sweep import BranchSet, SweepSpec, run_dynamics_batch, run_sweep  # noqa: E402

__all__ = [
    "__version__",
    "AdiabaticValidityWarning",
    "AmbiguousPhase",
    "MagnoEPError",
    "NoSignChange",
    "NondegenerateModes",
    "NotPseudoHermitian",
    "ParseError",
    "SerializationError",
    "StepTooLarge",
    "TooShort",
    "ValidationError",
    "ZeroDenominator",
    "DynamicsMatrix",
    "PhysicalParams",
    "SymmetryClass",
    "ThreeModeModel",
    "TwoModeModel",
    "check_pseudo_hermitian",
    "dynamics_matrix",
    "effective_rates",
    "reduce_to_three_mode",
    "reduce_to_two_mode",
    "symmetry_class",
    "ComplexEigenvalue",
    "PhaseLabel",
    "PhaseReport",
    "Spectrum",
    "classify_phase",
    "eig2_closed_form",
    "eig3",
    "locate_ep",
    "spectrum",
    "EnvelopeFit",
    "GrowthClass",
    "InitialState",
    "Trajectory",
    "closed_form_two_mode",
    "fit_envelope",
    "integrate",
    "matrix_exponential_oracle",
    "max_step",
    "BranchSet",
    "SweepSpec",
    "run_dynamics_batch",
    "run_sweep",
]
