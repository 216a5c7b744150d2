"""Exponential functional I = int_0^inf exp(-X(t)) dt of the jump regime.

Finiteness is certified through the 2x2 exponent matrix: I is a.s. finite as
soon as some gamma in (0, 1] makes both lambda_i + ell_i(gamma) positive and
the determinant of the exponent matrix positive. For the jump-telegraph
process with opposite deterministic jumps (y0 + y1 = 0, y0 <= 0) the law of
I is known in closed form: a Beta law on a bounded interval when both trends
are positive, a shifted Gamma law when the second trend is zero, and a
Beta-prime law when the trends have opposite signs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidParams, UnsupportedDomain
from .levy_models import Dirac, Drift, laplace_exponent, law_laplace
from .regime import Jump, RegimeModel, eigen_data, exponent_matrix, require_jump
from .special import betainc, gammainc, log_beta

SEARCH_DEPTH = 40
BISECTION_STEPS = 30


class Status(str, Enum):
    FINITE = "Finite"
    INFINITE_AS = "InfiniteAS"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class FinitenessVerdict:
    status: Status
    certificate: float | None = None
    case_tag: str | None = None
    checks: dict = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return self.status is Status.FINITE


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


def _exponents(model: RegimeModel, gamma: float):
    jump = require_jump(model)
    l0 = laplace_exponent(model.block0, gamma)
    l1 = laplace_exponent(model.block1, gamma)
    h0 = law_laplace(jump.h0, gamma)
    h1 = law_laplace(jump.h1, gamma)
    return l0, l1, h0, h1


def decay_quantities(model: RegimeModel, gamma: float) -> dict:
    """Trace, determinant and diagonal entries of the exponent matrix at gamma."""
    l0, l1, h0, h1 = _exponents(model, gamma)
    lam0, lam1 = model.lambda0, model.lambda1
    return {
        "gamma": float(gamma),
        "trace": lam0 + lam1 + l0 + l1,
        "det": l0 * l1 + lam0 * l1 + lam1 * l0 + lam0 * lam1 * (1.0 - h0 * h1),
        "diag0": lam0 + l0,
        "diag1": lam1 + l1,
    }


def mgf_decay_conditions(model: RegimeModel, gamma: float) -> tuple[bool, bool]:
    """(trace > 0, det > 0) for the exponent matrix at gamma."""
    if not gamma > 0:
        raise UnsupportedDomain("gamma must be > 0")
    q = decay_quantities(model, gamma)
    return bool(q["trace"] > 0), bool(q["det"] > 0)


def _certifies(model: RegimeModel, gamma: float) -> dict | None:
    try:
        q = decay_quantities(model, gamma)
    except UnsupportedDomain:
        return None
    if q["diag0"] > 0 and q["diag1"] > 0 and q["det"] > 0:
        return q
    return None


def recheck_certificate(model: RegimeModel, gamma: float) -> bool:
    return 0 < gamma <= 1 and _certifies(model, gamma) is not None


def _telegraph_jumps(model: RegimeModel):
    """(lambda0, lambda1, c0, c1, y0, y1) if the model is a jump-telegraph
    process with deterministic jumps, else None."""
    jump = require_jump(model)
    if not all(isinstance(b, Drift) for b in model.blocks):
        return None
    if not (isinstance(jump.h0, Dirac) and isinstance(jump.h1, Dirac)):
        return None
    return (model.lambda0, model.lambda1, model.block0.c, model.block1.c, jump.h0.y, jump.h1.y)


def _opposite_jumps(y0: float, y1: float) -> bool:
    return abs(y0 + y1) <= 1e-12 * max(1.0, abs(y0)) and y0 <= 0


def finiteness_certificate(model: RegimeModel) -> FinitenessVerdict:
    """Search gamma = 2^-k, k = 0..40, then bisect towards the largest passing gamma."""
    require_jump(model)
    found = None
    for k in range(SEARCH_DEPTH + 1):
        gamma = 2.0 ** -k
        if _certifies(model, gamma) is not None:
            found = k
            break
    if found is not None:
        good = 2.0 ** -found
        if found > 0:
            bad = 2.0 * good
            for _ in range(BISECTION_STEPS):
                mid = 0.5 * (good + bad)
                if _certifies(model, mid) is not None:
                    good = mid
                else:
                    bad = mid
        return FinitenessVerdict(Status.FINITE, certificate=good, checks=_certifies(model, good))

    tele = _telegraph_jumps(model)
    if tele is not None:
        lam0, lam1, c0, c1, y0, y1 = tele
        if c1 < 0 < c0 and _opposite_jumps(y0, y1) and lam0 / c0 + lam1 / c1 >= 0:
            return FinitenessVerdict(Status.INFINITE_AS, case_tag="opposite-trends")
    return FinitenessVerdict(Status.UNKNOWN)


# ---------------------------------------------------------------------------
# Alternating stable subordinators
# ---------------------------------------------------------------------------


class StableVariant(str, Enum):
    PLUS = "Plus"
    MINUS0 = "Minus0"
    MINUS1 = "Minus1"


def stable_finiteness(a0: float, a1: float, alpha0: float, alpha1: float, beta: float, b: float,
                      variant, lambda0: float = 1.0, lambda1: float = 1.0) -> FinitenessVerdict:
    """Case table for alternating stable subordinators with switch jumps whose
    sum has Laplace transform 1 - b xi^beta + o(xi^beta) at 0.

    Minus0 negates the state-0 subordinator, Minus1 the state-1 one.
    """
    variant = StableVariant(variant)
    if not (a0 > 0 and a1 > 0):
        raise InvalidParams("a0 and a1 must be > 0")
    if not (1 > alpha0 >= alpha1 > 0):
        raise InvalidParams("need 1 > alpha0 >= alpha1 > 0")
    if not beta > 0:
        raise InvalidParams("beta must be > 0")
    if not (lambda0 > 0 and lambda1 > 0):
        raise InvalidParams("lambda0 and lambda1 must be > 0")

    tag = None
    if variant is StableVariant.PLUS:
        if beta > alpha1:
            tag = "1a"
        elif beta == alpha1:
            if alpha0 > alpha1:
                ok = a1 + lambda1 * b >= 0
            else:
                ok = lambda0 * a1 + lambda1 * a0 + lambda0 * lambda1 * b >= 0
            tag = "1b" if ok else None
        elif b >= 0:
            tag = "1c"
    elif variant is StableVariant.MINUS0:
        if beta > alpha1:
            tag = "2a"
        elif beta == alpha1:
            tag = "2b" if a1 + lambda1 * b > 0 else None
        elif b >= 0:
            tag = "2c"
    else:
        if beta == alpha1:
            tag = "3a" if lambda1 * b - a1 >= 0 else None
        elif beta < alpha1 and b >= 0:
            tag = "3b"
    if tag is None:
        return FinitenessVerdict(Status.UNKNOWN)
    return FinitenessVerdict(Status.FINITE, case_tag=tag)


# ---------------------------------------------------------------------------
# Mean
# ---------------------------------------------------------------------------


def expfun_mean(model: RegimeModel, start_regime: int) -> float:
    """E[I | eps(0) = start_regime]; math.inf when the decay conditions fail at 1."""
    if start_regime not in (0, 1):
        raise InvalidParams("start_regime must be 0 or 1")
    tr_ok, det_ok = mgf_decay_conditions(model, 1.0)
    if not (tr_ok and det_ok):
        return math.inf
    eig = eigen_data(exponent_matrix(model, 1.0))
    return float(eig.e1[start_regime] / eig.alpha1 + eig.e2[start_regime] / eig.alpha2)


# ---------------------------------------------------------------------------
# Closed-form densities for the jump-telegraph process
# ---------------------------------------------------------------------------


class DensityCase(str, Enum):
    COMPACT_BETA = "CompactBeta"
    SHIFTED_GAMMA = "ShiftedGamma"
    BETA_PRIME = "BetaPrime"


@dataclass(frozen=True)
class ExpFunDensity:
    """Density of I for one starting state.

    CompactBeta:   (t - lower) / (upper - lower) ~ Beta(shape_a, shape_b).
    ShiftedGamma:  rate (t - lower) ~ Gamma(shape_a).
    BetaPrime:     (t - lower) / (t - pole) ~ Beta(shape_a, shape_b), pole < lower.
    ``norm`` is the constant in front of the power (and exponential) factors.
    """

    case_tag: DensityCase
    lower: float
    upper: float
    shape_a: float
    shape_b: float
    norm: float
    alpha: float
    beta: float
    rate: float = math.nan
    pole: float = math.nan

    @property
    def mean(self) -> float:
        if self.case_tag is DensityCase.COMPACT_BETA:
            return self.lower + (self.upper - self.lower) * self.shape_a / (self.shape_a + self.shape_b)
        if self.case_tag is DensityCase.SHIFTED_GAMMA:
            return self.lower + self.shape_a / self.rate
        if self.shape_b <= 1:
            return math.inf
        # t - lower = K x / (1 - x) with x ~ Beta(a, b)
        K = self.lower - self.pole
        return self.lower + K * self.shape_a / (self.shape_b - 1)


def _log_pdf(d: ExpFunDensity, t: np.ndarray) -> np.ndarray:
    s = t - d.lower
    if d.case_tag is DensityCase.COMPACT_BETA:
        return (math.log(d.norm) + (d.shape_a - 1) * np.log(s)
                + (d.shape_b - 1) * np.log(d.upper - t))
    if d.case_tag is DensityCase.SHIFTED_GAMMA:
        return math.log(d.norm) + (d.shape_a - 1) * np.log(s) - d.rate * s
    return (math.log(d.norm) + (d.shape_a - 1) * np.log(s)
            - (d.shape_a + d.shape_b) * np.log(t - d.pole))


def expfun_density_eval(d: ExpFunDensity, t):
    t = np.asarray(t, dtype=float)
    inside = (t > d.lower) & (t < d.upper)
    safe = np.where(inside, t, 0.5 * (d.lower + min(d.upper, d.lower + 1.0)))
    with np.errstate(divide="ignore"):
        out = np.where(inside, np.exp(_log_pdf(d, safe)), 0.0)
    return float(out) if out.ndim == 0 else out


def expfun_cdf(d: ExpFunDensity, t):
    t = np.asarray(t, dtype=float)
    if d.case_tag is DensityCase.COMPACT_BETA:
        x = np.clip((t - d.lower) / (d.upper - d.lower), 0.0, 1.0)
        out = betainc(d.shape_a, d.shape_b, x)
    elif d.case_tag is DensityCase.SHIFTED_GAMMA:
        out = gammainc(d.shape_a, np.maximum(d.rate * (t - d.lower), 0.0))
    else:
        s = np.maximum(t - d.lower, 0.0)
        with np.errstate(invalid="ignore"):
            x = np.where(np.isinf(s), 1.0, s / (s + d.lower - d.pole))
        out = betainc(d.shape_a, d.shape_b, x)
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def telegraph_expfun_density(lambda0: float, lambda1: float, c0: float, c1: float,
                             y0: float, y1: float):
    """Densities (f0, f1) of I started in state 0 and 1, or Status.INFINITE_AS.

    Requires c0 > c1, c0 > 0, y0 + y1 = 0 and y0 <= 0.
    """
    if not (lambda0 > 0 and lambda1 > 0):
        raise InvalidParams("lambda0 and lambda1 must be > 0")
    if not (c0 > 0 and c0 > c1):
        raise InvalidParams("need c0 > 0 and c0 > c1")
    if not _opposite_jumps(y0, y1):
        raise InvalidParams("need y0 + y1 = 0 and y0 <= 0")
    a = 1.0 / c0
    alpha = lambda0 / c0
    lo0, lo1 = a, a * math.exp(-y1)

    if c1 > 0:
        b = 1.0 / c1
        beta = lambda1 / c1
        hi0 = b * math.exp(-y0)
        A0 = (hi0 - a) ** (-alpha - beta) / math.exp(log_beta(alpha, beta + 1))
        A1 = (b - lo1) ** (-alpha - beta) / math.exp(log_beta(alpha + 1, beta))
        f0 = ExpFunDensity(DensityCase.COMPACT_BETA, lo0, hi0, alpha, beta + 1, A0, alpha, beta)
        f1 = ExpFunDensity(DensityCase.COMPACT_BETA, lo1, b, alpha + 1, beta, A1, alpha, beta)
        return f0, f1

    if c1 == 0:
        r0 = lambda1 * math.exp(y0)
        A0 = math.exp(alpha * math.log(r0) - math.lgamma(alpha))
        A1 = math.exp((alpha + 1) * math.log(lambda1) - math.lgamma(alpha + 1))
        f0 = ExpFunDensity(DensityCase.SHIFTED_GAMMA, lo0, math.inf, alpha, math.nan, A0,
                           alpha, math.nan, rate=r0)
        f1 = ExpFunDensity(DensityCase.SHIFTED_GAMMA, lo1, math.inf, alpha + 1, math.nan, A1,
                           alpha, math.nan, rate=lambda1)
        return f0, f1

    b = 1.0 / c1
    beta = lambda1 / c1
    if alpha + beta >= 0:
        return Status.INFINITE_AS
    pole0 = b * math.exp(-y0)
    A0 = (a - pole0) ** (-alpha - beta) / math.exp(log_beta(-alpha - beta, alpha))
    A1 = (lo1 - b) ** (-alpha - beta) / math.exp(log_beta(-alpha - beta, alpha + 1))
    f0 = ExpFunDensity(DensityCase.BETA_PRIME, lo0, math.inf, alpha, -alpha - beta, A0,
                       alpha, beta, pole=pole0)
    f1 = ExpFunDensity(DensityCase.BETA_PRIME, lo1, math.inf, alpha + 1, -alpha - beta, A1,
                       alpha, beta, pole=b)
    return f0, f1


def telegraph_jump_model(lambda0, lambda1, c0, c1, y0, y1) -> RegimeModel:
    """The jump-telegraph model matching ``telegraph_expfun_density`` arguments."""

    return RegimeModel(lambda0, lambda1, Drift(c0), Drift(c1), Jump(Dirac(y0), Dirac(y1)))
