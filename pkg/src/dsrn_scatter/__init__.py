"""Partial-wave Dirac scattering on de Sitter-Reissner-Nordstrom exteriors.

Direct problem: horizon geometry, Regge-Wheeler potentials, Jost/Faddeev
matrix solutions (independent ODE and Volterra-series solvers), scattering
data and partial-wave S-matrices, and their closed-form large angular
momentum asymptotics (real or complex).  Inverse problem: recovery of
(M, Q, Lambda) from fixed-energy reflection blocks at finitely many
angular momenta, plus the final polynomial-coefficient identification.
"""

from .geometry import (
    BlackHoleParams,
    HorizonData,
    InadmissibleParametersError,
    evaluate_F,
    find_horizons,
    radius_from_x,
    regge_wheeler_x,
)
from .potentials import PotentialProfile, build_profile
from .bessel import bessel_I, bessel_I_asymptotic, bessel_K
from .jost import (
    DIRAC,
    GAMMA0,
    GAMMA1,
    GAMMA2,
    GAMMA3,
    JostMatrix,
    ReducedPotential,
    SolverError,
    coupling_coeffs,
    faddeev_left_volterra,
    faddeev_right_ode,
    faddeev_right_volterra,
    jost_left,
    truncation_range,
    volterra_grid,
)
from .scattering import (
    PartialWaveSMatrix,
    PoleOfReflectionError,
    ScatteringData,
    compute_smatrix,
    extract_scattering,
    matrix_AL,
    reflection_L,
    smatrix_hat,
    smatrix_physical,
)
from .asymptotics import (
    ExponentSet,
    estimate_width,
    exponents,
    predict_AL_blocks,
    predict_jost_leading,
)
from .inverse import (
    ConditioningError,
    IdentifiedParams,
    InverseProblem,
    InversionResult,
    identify_params_from_ratios,
    potential_ratios,
    recover_parameters,
    synthesize_reflection_data,
)

__version__ = "0.1.0"
