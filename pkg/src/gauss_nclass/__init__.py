"""Two-mode Gaussian phase-space toolkit.

Decides when nonclassicality of the Glauber-Sudarshan P function certifies
entanglement: canonical forms under local Gaussian unitaries, the Duan and
Simon criteria, logarithmic negativity, nonclassicality depth, and an
analytic non-Gaussian example of global nonclassicality without entanglement.
"""

__version__ = "0.1.0"

from .gaussian import (  # noqa: E402
    CovarianceMatrix,
    LocalSymplectic,
    SamplerConfig,
    StandardMoments,
    apply_local,
    sample_state,
    symplectic_eigenvalues,
    tmsv,
    to_standard_moments,
    vacuum,
    validate,
)
from .measures import (  # noqa: E402
    gaussian_p_positive,
    log_negativity,
    measure_all,
    nonclassicality_depth,
    simon_separable,
)
from .canonical import canonicalize, reduce_to_standard_form, solve_squeezings  # noqa: E402

__all__ = [
    "CovarianceMatrix",
    "LocalSymplectic",
    "SamplerConfig",
    "StandardMoments",
    "apply_local",
    "canonicalize",
    "gaussian_p_positive",
    "log_negativity",
    "measure_all",
    "nonclassicality_depth",
    "reduce_to_standard_form",
    "sample_state",
    "simon_separable",
    "solve_squeezings",
    "symplectic_eigenvalues",
    "tmsv",
    "to_standard_moments",
    "vacuum",
    "validate",
]
