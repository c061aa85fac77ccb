"""declab: a numerical laboratory for environment-induced superselection.

Exactly solvable decoherence models, density-operator state-space geometry,
sector algebra with off-diagonal suppression norms, and brute-force oracles
validating every closed form.
"""

from .errors import (
    BadWeights,
    ConvergenceFailure,
    DeclabError,
    DimensionMismatch,
    DimensionTooLarge,
    InsufficientData,
    NonDecaying,
    NotAState,
    NotComplete,
    NotDiscrete,
    NotHermitian,
    NotIdempotent,
    NotOrthogonal,
    NotUnitary,
    OutsideBall,
    ParseError,
    QuadratureFailure,
    ValidationError,
)
from .models import (
    ArakiZurekModel,
    CorrelatedInitialState,
    SpectralDensity,
    SpinModel,
    asymptotic_map,
    az_evolve,
    az_evolve_correlated,
    decoherence_function,
    full_simulation_oracle,
    recurrence_window,
    rotation_axis,
    spin_asymptotics,
    spin_evolve,
)
from .operators import (
    HermitianEig,
    SchattenNorms,
    hermitian_eig,
    partial_trace_env,
    propagator,
    schatten_norms,
    tensor_product,
)
from .quadrature import gauss_legendre_adaptive
from .states import (
    PAULI,
    DensityOperator,
    PureStateDecomposition,
    alternate_decomposition,
    bloch_to_density,
    classical_decompose,
    density_to_bloch,
    haar_unitary,
    mix,
    random_density,
    spectral_decomposition,
    trace_distance,
)
from .superselection import (
    DecayFit,
    OffDiagonalNorms,
    SectorStructure,
    block_diagonal_sectors,
    fit_power_law_decay,
    off_diagonal_norms,
    sector_probabilities,
    sector_project,
    validate_sectors,
)

__version__ = "0.1.0"

__all__ = [
    "ArakiZurekModel",
    "BadWeights",
    "ConvergenceFailure",
    "CorrelatedInitialState",
    "DecayFit",
    "DeclabError",
    "DensityOperator",
    "DimensionMismatch",
    "DimensionTooLarge",
    "HermitianEig",
    "InsufficientData",
    "NonDecaying",
    "NotAState",
    "NotComplete",
    "NotDiscrete",
    "NotHermitian",
    "NotIdempotent",
    "NotOrthogonal",
    "NotUnitary",
    "OffDiagonalNorms",
    "OutsideBall",
    "PAULI",
    "ParseError",
    "PureStateDecomposition",
    "QuadratureFailure",
    "SchattenNorms",
    "SectorStructure",
    "SpectralDensity",
    "SpinModel",
    "ValidationError",
    "alternate_decomposition",
    "asymptotic_map",
    "az_evolve",
    "az_evolve_correlated",
    "bloch_to_density",
    "block_diagonal_sectors",
    "classical_decompose",
    "decoherence_function",
    "density_to_bloch",
    "fit_power_law_decay",
    "full_simulation_oracle",
    "gauss_legendre_adaptive",
    "haar_unitary",
    "hermitian_eig",
    "mix",
    "off_diagonal_norms",
    "partial_trace_env",
    "propagator",
    "random_density",
    "recurrence_window",
    "rotation_axis",
    "schatten_norms",
    "sector_probabilities",
    "sector_project",
    "spectral_decomposition",
    "spin_asymptotics",
    "spin_evolve",
    "tensor_product",
    "trace_distance",
    "validate_sectors",
]
