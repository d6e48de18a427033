"""Non-Gaussianity of bosonic quantum states in a truncated Fock basis."""

from .catalog import (
    CatalogSpec,
    haar_unitary,
    make_bell_like,
    make_cat,
    make_coherent,
    make_fock,
    make_squeezed_vacuum,
    make_thermal,
    random_state,
    simplex_point,
)
from .channels import (
    IdentityChannel,
    IpsChannel,
    LossChannel,
    ips_apply,
    ips_state,
    loss_apply,
    loss_fock_diagonal,
)
from .errors import (
    ConditioningError,
    ConvergenceError,
    DimensionError,
    DomainError,
    GridCoverageError,
    NonGaussError,
    NumericIntegrityError,
    StateValidationError,
    SynthesisError,
    TruncationWarning,
)
from .fock import (
    FockOperator,
    FockState,
    annihilation,
    basis_state,
    beam_splitter,
    displacement,
    embed_state,
    hs_norm,
    overlap,
    partial_trace,
    purity,
    squeeze,
    tensor,
    thermal_state,
    two_mode_squeeze,
    vacuum_state,
)
from .gaussian import (
    GaussianSpec,
    euler_decompose,
    gaussian_state,
    reference_gaussian,
    single_mode_params,
    williamson,
)
from .measure import (
    DeltaPrimeResult,
    MapMeasureResult,
    NonGaussianityResult,
    SearchBox,
    delta_fock,
    delta_fock_copies,
    delta_loss,
    delta_prime,
    delta_product,
    hs_distance_sq,
    map_non_gaussianity,
    non_gaussianity,
    optimal_copies,
    overlap_fock_displaced_thermal,
    overlap_loss_displaced_thermal,
)
from .moments import Moments, covariance_matrix, mean_vector, moments, symplectic_form
from .phasespace import (
    char_function,
    displacement_matrix,
    gaussian_char_function,
    hs_distance_sq_quadrature,
    quadrature_purity,
)
from .statefile import load_state, save_state

__version__ = "0.1.0"
