"""Two-state switching structure.

A ``RegimeModel`` couples switching intensities with one Lévy block per
state and a restart variant: ``Renewal`` (restart from a fresh point drawn
from g_i) or ``Jump`` (keep the value and add a jump drawn from h_i when
leaving state i).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidParams, UnsupportedDomain, WrongVariant
from .levy_models import LevyBlock, ScalarLaw, laplace_exponent, law_laplace


@dataclass(frozen=True)
class Renewal:
    g0: ScalarLaw
    g1: ScalarLaw


@dataclass(frozen=True)
class Jump:
    h0: ScalarLaw
    h1: ScalarLaw


@dataclass(frozen=True)
class RegimeModel:
    lambda0: float
    lambda1: float
    block0: LevyBlock
    block1: LevyBlock
    variant: Union[Renewal, Jump]

    def __post_init__(self):
        if not (np.isfinite(self.lambda0) and self.lambda0 > 0):
            raise InvalidParams("lambda0 must be > 0")
        if not (np.isfinite(self.lambda1) and self.lambda1 > 0):
            raise InvalidParams("lambda1 must be > 0")
        if not isinstance(self.variant, (Renewal, Jump)):
            raise InvalidParams("variant must be Renewal or Jump")

    @property
    def lam(self) -> float:
        """Mean intensity (lambda0 + lambda1) / 2."""
        return 0.5 * (self.lambda0 + self.lambda1)

    @property
    def mu(self) -> float:
        """Half difference (lambda0 - lambda1) / 2."""
        return 0.5 * (self.lambda0 - self.lambda1)

    @property
    def blocks(self) -> tuple:
        return (self.block0, self.block1)

    @property
    def lambdas(self) -> tuple:
        return (self.lambda0, self.lambda1)

    @property
    def is_jump(self) -> bool:
        return isinstance(self.variant, Jump)

    def laws(self) -> tuple:
        v = self.variant
        return (v.h0, v.h1) if isinstance(v, Jump) else (v.g0, v.g1)

    def ell(self, xi: float) -> float:
        """Mean Laplace exponent (ell0 + ell1) / 2."""
        return 0.5 * (laplace_exponent(self.block0, xi) + laplace_exponent(self.block1, xi))

    def m(self, xi: float) -> float:
        """Half difference (ell0 - ell1) / 2."""
        return 0.5 * (laplace_exponent(self.block0, xi) - laplace_exponent(self.block1, xi))


def require_jump(model: RegimeModel) -> Jump:
    if not isinstance(model.variant, Jump):
        raise WrongVariant("operation needs a Jump-variant model")
    return model.variant


def require_renewal(model: RegimeModel) -> Renewal:
    if not isinstance(model.variant, Renewal):
        raise WrongVariant("operation needs a Renewal-variant model")
    return model.variant


@dataclass(frozen=True)
class ExponentMatrix:
    """Entries of the 2x2 generator-type matrix whose exponential gives the mgf."""

    l00: float
    l01: float
    l10: float
    l11: float

    def as_array(self) -> np.ndarray:
        return np.array([[self.l00, self.l01], [self.l10, self.l11]])

    @property
    def trace(self) -> float:
        return self.l00 + self.l11

    @property
    def det(self) -> float:
        return self.l00 * self.l11 - self.l01 * self.l10


@dataclass(frozen=True)
class EigenData:
    alpha1: float
    alpha2: float
    e1: np.ndarray
    e2: np.ndarray
    D: float


def exponent_matrix(model: RegimeModel, xi: float) -> ExponentMatrix:
    jump = require_jump(model)
    xi = float(xi)
    l0 = laplace_exponent(model.block0, xi)
    l1 = laplace_exponent(model.block1, xi)
    h0 = law_laplace(jump.h0, xi)
    h1 = law_laplace(jump.h1, xi)
    return ExponentMatrix(
        l00=model.lambda0 + l0,
        l01=-model.lambda0 * h0,
        l10=-model.lambda1 * h1,
        l11=model.lambda1 + l1,
    )


def eigen_data(matrix: ExponentMatrix) -> EigenData:
    """Explicit eigenvalues alpha1 <= alpha2 and eigenvectors with e1 + e2 = (1, 1).

    With half-trace s = lam + ell and half-gap d = mu + m,
    alpha_{1,2} = s -/+ D and D^2 = d^2 + lambda0 lambda1 h0 h1.
    """
    s = 0.5 * (matrix.l00 + matrix.l11)
    d = 0.5 * (matrix.l00 - matrix.l11)
    D2 = d * d + matrix.l01 * matrix.l10
    if not D2 > 0:
        raise UnsupportedDomain(f"degenerate discriminant D^2={D2!r}")
    D = float(np.sqrt(D2))
    # -l01 = lambda0 h0, -l10 = lambda1 h1
    r0 = (d + matrix.l01) / D
    r1 = (d - matrix.l10) / D
    e1 = 0.5 * np.array([1.0 - r0, 1.0 + r1])
    e2 = 0.5 * np.array([1.0 + r0, 1.0 - r1])
    return EigenData(alpha1=s - D, alpha2=s + D, e1=e1, e2=e2, D=D)


def renewal_kernel(model: RegimeModel, t: float) -> np.ndarray:
    """Kernel matrix B(t) of the renewal density representation."""
    if t < 0:
        raise InvalidParams("t must be >= 0")
    l0, l1 = model.lambda0, model.lambda1
    two_lam = l0 + l1
    q = np.exp(-two_lam * t)
    return np.array([
        [1.0 - q, 1.0 + (l0 / l1) * q],
        [1.0 + (l1 / l0) * q, 1.0 - q],
    ]) / two_lam
