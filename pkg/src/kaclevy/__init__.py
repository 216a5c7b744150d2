"""Two-state Markov-modulated Levy processes with restart or jump switching."""
from .errors import InvalidCase, InvalidParams, KacLevyError, UnsupportedDomain, WrongVariant
from .levy_models import (
    BrownianDrift,
    CompoundPoissonBilateral,
    CompoundPoissonExp,
    Dirac,
    Drift,
    Exponential,
    Gaussian,
    StableSubordinator,
    TwoPoint,
    khintchine_exponent,
    laplace_exponent,
)
from .regime import Jump, RegimeModel, Renewal, eigen_data, exponent_matrix, renewal_kernel
from .transforms import jump_mgf, limit_char, renewal_char

__version__ = "0.1.0"
