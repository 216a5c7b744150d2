"""Closed-form transforms of X(t) in both restart regimes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, UnsupportedDomain
from .levy_models import (
    CompoundPoissonBilateral,
    LevyBlock,
    is_formal,
    is_subordinator,
    khintchine_exponent,
    laplace_exponent,
    law_fourier,
)
from .regime import (
    ExponentMatrix,
    RegimeModel,
    eigen_data,
    exponent_matrix,
    require_jump,
    require_renewal,
)

# relative to lambda0 + lambda1
SINGULAR_EPS = 1e-6


@dataclass(frozen=True)
class TransformPair:
    """Transform conditioned on the initial state: phi0 for eps(0)=0, phi1 for eps(0)=1."""

    phi0: complex
    phi1: complex

    def __iter__(self):
        yield self.phi0
        yield self.phi1

    def __getitem__(self, i):
        return (self.phi0, self.phi1)[i]


def _reject_formal(*blocks: LevyBlock) -> None:
    for b in blocks:
        if is_formal(b):
            raise UnsupportedDomain("negated stable subordinators are only usable in finiteness checks")


def _decay_integral(k, t):
    """int_0^t exp(-k s) ds = (1 - exp(-k t)) / k for Re k > 0."""
    return -np.expm1(-k * t) / k


def _gap_term(delta, two_lam, t, eps):
    """(exp(-2 lam t) - exp(-(2 lam + delta) t)) / delta with the delta -> 0 limit.

    Within |delta| < eps a two-term Taylor expansion replaces the quotient.
    """
    delta = np.asarray(delta, dtype=complex)
    base = np.exp(-two_lam * t)
    small = np.abs(delta) < eps
    safe = np.where(small, 1.0, delta)
    with np.errstate(over="ignore", invalid="ignore"):
        if t == 0:
            direct = np.zeros_like(safe)
        else:
            via_expm1 = base * (-np.expm1(-safe * t)) / safe
            plain = (base - np.exp(-(two_lam + safe) * t)) / safe
            direct = np.where(np.real(-safe * t) > 50.0, plain, via_expm1)
    taylor = base * (t - 0.5 * delta * t * t)
    return np.where(small, taylor, direct)


def renewal_char(model: RegimeModel, t: float, theta) -> TransformPair:
    """Fourier transform E[exp(i theta X(t)) | eps(0)=i] of the renewal regime."""
    ren = require_renewal(model)
    if t < 0:
        raise InvalidParams("t must be >= 0")
    _reject_formal(*model.blocks)
    l0, l1 = model.lambda0, model.lambda1
    two_lam = l0 + l1
    psi0 = khintchine_exponent(model.block0, theta)
    psi1 = khintchine_exponent(model.block1, theta)
    g0 = law_fourier(ren.g0, theta)
    g1 = law_fourier(ren.g1, theta)
    k0 = l0 + psi0
    k1 = l1 + psi1
    eps = SINGULAR_EPS * two_lam

    i0 = _decay_integral(k0, t)
    i1 = _decay_integral(k1, t)
    gap0 = _gap_term(psi0 - l1, two_lam, t, eps)
    gap1 = _gap_term(psi1 - l0, two_lam, t, eps)

    phi00 = i0 - gap0
    phi01 = i1 + (l0 / l1) * gap1
    phi10 = i0 + (l1 / l0) * gap0
    phi11 = i1 - gap1

    w = l0 * l1 / two_lam
    out0 = np.exp(-k0 * t) * g0 + w * (phi00 * g0 + phi01 * g1)
    out1 = np.exp(-k1 * t) * g1 + w * (phi10 * g0 + phi11 * g1)
    if np.ndim(out0) == 0:
        return TransformPair(complex(out0), complex(out1))
    return TransformPair(out0, out1)


def limit_char(model: RegimeModel, theta):
    """Fourier transform of the t -> infinity limit law of the renewal regime."""
    ren = require_renewal(model)
    _reject_formal(*model.blocks)
    l0, l1 = model.lambda0, model.lambda1
    psi0 = khintchine_exponent(model.block0, theta)
    psi1 = khintchine_exponent(model.block1, theta)
    out = (l0 * l1 / (l0 + l1)) * (law_fourier(ren.g0, theta) / (l0 + psi0)
                                   + law_fourier(ren.g1, theta) / (l1 + psi1))
    return complex(out) if np.ndim(out) == 0 else out


def mgf_from_matrix(matrix: ExponentMatrix, t: float) -> np.ndarray:
    """exp(-t M) (1, 1)^T through the explicit spectral decomposition."""
    eig = eigen_data(matrix)
    return np.exp(-eig.alpha1 * t) * eig.e1 + np.exp(-eig.alpha2 * t) * eig.e2


def mgf_from_matrix_hyperbolic(matrix: ExponentMatrix, t: float) -> np.ndarray:
    """Same quantity written with cosh and sinh of t D."""
    s = 0.5 * (matrix.l00 + matrix.l11)
    d = 0.5 * (matrix.l00 - matrix.l11)
    D2 = d * d + matrix.l01 * matrix.l10
    D = np.sqrt(D2)
    ch = np.cosh(t * D)
    # sinh(tD)/D, continuous at D = 0
    shD = t if D == 0 else np.sinh(t * D) / D
    pre = np.exp(-s * t)
    return pre * np.array([
        ch + (-matrix.l01 - d) * shD,
        ch + (-matrix.l10 + d) * shD,
    ])


def jump_mgf(model: RegimeModel, t: float, xi: float) -> TransformPair:
    """Laplace transform E[exp(-xi X(t)) | eps(0)=i] of the jump regime (real xi)."""
    require_jump(model)
    if t < 0:
        raise InvalidParams("t must be >= 0")
    _reject_formal(*model.blocks)
    vec = mgf_from_matrix(exponent_matrix(model, xi), t)
    return TransformPair(float(vec[0]), float(vec[1]))


def jump_mgf_hyperbolic(model: RegimeModel, t: float, xi: float) -> TransformPair:
    require_jump(model)
    _reject_formal(*model.blocks)
    vec = mgf_from_matrix_hyperbolic(exponent_matrix(model, xi), t)
    return TransformPair(float(vec[0]), float(vec[1]))


def telegraph_mgf_classical(lambda0, lambda1, c0, c1, t, xi) -> TransformPair:
    """Moment generating functions of the plain telegraph process (no switch jumps)."""
    lam = 0.5 * (lambda0 + lambda1)
    mu = 0.5 * (lambda0 - lambda1)
    a = 0.5 * (c0 + c1)
    c = 0.5 * (c0 - c1)
    D = np.sqrt((mu + c * xi) ** 2 + lambda0 * lambda1)
    pre = np.exp(-t * (lam + a * xi))
    sh = np.sinh(t * D) / D
    return TransformPair(
        float(pre * (np.cosh(t * D) + (lam - c * xi) * sh)),
        float(pre * (np.cosh(t * D) + (lam + c * xi) * sh)),
    )


# ---------------------------------------------------------------------------
# Switching triggered by big jumps of the driving process
# ---------------------------------------------------------------------------


def _require_bilateral(block) -> CompoundPoissonBilateral:
    if not isinstance(block, CompoundPoissonBilateral):
        raise InvalidParams("big-jump switching needs CompoundPoissonBilateral blocks")
    return block


def bigjump_rates(block0, block1, R0: float, R1: float) -> tuple[float, float]:
    """Switching intensities: mass of downward jumps below -R0 in state 0 and
    of upward jumps above R1 in state 1."""
    b0, b1 = _require_bilateral(block0), _require_bilateral(block1)
    if not (R0 > 0 and R1 > 0):
        raise InvalidParams("R0 and R1 must be > 0")
    lam0 = b0.nu * (1 - b0.p) * np.exp(-b0.a_minus * R0)
    lam1 = b1.nu * b1.p * np.exp(-b1.a_plus * R1)
    return float(lam0), float(lam1)


def bigjump_tail_laplace(block0, block1, R0: float, R1: float, xi: float) -> tuple[float, float]:
    """int over the switching tail of exp(-xi x) Pi_i(dx), for i = 0, 1."""
    b0, b1 = _require_bilateral(block0), _require_bilateral(block1)
    if not (R0 > 0 and R1 > 0):
        raise InvalidParams("R0 and R1 must be > 0")
    if not (xi < b0.a_minus):
        raise UnsupportedDomain("state-0 tail integral diverges: need xi < a_minus")
    if not (xi > -b1.a_plus):
        raise UnsupportedDomain("state-1 tail integral diverges: need xi > -a_plus")
    am, ap = b0.a_minus, b1.a_plus
    a0 = b0.nu * (1 - b0.p) * am * np.exp(-(am - xi) * R0) / (am - xi)
    a1 = b1.nu * b1.p * ap * np.exp(-(ap + xi) * R1) / (ap + xi)
    return float(a0), float(a1)


def bigjump_matrix(block0, block1, R0, R1, xi, include_trigger: bool = True) -> ExponentMatrix:
    """Exponent matrix of the big-jump switching model.

    With ``include_trigger`` the jump that causes the switch stays in the
    path, so the off-diagonal entries carry the tail transforms a_i(xi);
    otherwise the triggering jump is dropped and they carry the rates.
    """
    lam0, lam1 = bigjump_rates(block0, block1, R0, R1)
    a0, a1 = bigjump_tail_laplace(block0, block1, R0, R1, xi)
    l0 = laplace_exponent(block0, xi)
    l1 = laplace_exponent(block1, xi)
    off0, off1 = (a0, a1) if include_trigger else (lam0, lam1)
    return ExponentMatrix(l00=a0 + l0, l01=-off0, l10=-off1, l11=a1 + l1)


def bigjump_mgf(block0, block1, R0: float, R1: float, t: float, xi: float,
                include_trigger: bool = True) -> TransformPair:
    if t < 0:
        raise InvalidParams("t must be >= 0")
    M = bigjump_matrix(block0, block1, R0, R1, xi, include_trigger)
    D2 = (0.5 * (M.l00 - M.l11)) ** 2 + M.l01 * M.l10
    vec = mgf_from_matrix(M, t) if D2 > 1e-300 else mgf_from_matrix_hyperbolic(M, t)
    return TransformPair(float(vec[0]), float(vec[1]))


# ---------------------------------------------------------------------------
# Subordination
# ---------------------------------------------------------------------------


def subordinated_mgf(x_model: RegimeModel, z_model: RegimeModel, t: float, xi: float) -> np.ndarray:
    """L[i, j] = E[exp(-xi X(Z(t))) | eps_X(0)=i, eps_Z(0)=j] with X and Z independent."""
    require_jump(x_model)
    require_jump(z_model)
    for b in z_model.blocks:
        if not is_subordinator(b):
            raise InvalidParams(f"time-change block {b!r} is not a subordinator")
    eig = eigen_data(exponent_matrix(x_model, xi))
    out = np.zeros((2, 2))
    for alpha, vec in ((eig.alpha1, eig.e1), (eig.alpha2, eig.e2)):
        lz = jump_mgf(z_model, t, alpha)
        out += np.outer(vec, [lz.phi0, lz.phi1])
    return out
