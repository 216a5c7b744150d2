"""Parametric Lévy blocks and scalar laws.

Every block is an immutable dataclass. The two exponents follow the
conventions

    E[exp(i*theta*eta(t))] = exp(-t * psi(theta))
    E[exp(-xi*eta(t))]     = exp(-t * ell(xi)),   ell(xi) = psi(i*xi)

Arguments outside the domain where the transform is finite raise
``UnsupportedDomain`` rather than returning NaN.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidParams, UnsupportedDomain


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidParams(msg)


def _finite(*vals: float) -> bool:
    return all(np.isfinite(v) for v in vals)


# ---------------------------------------------------------------------------
# Lévy blocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Drift:
    """Deterministic motion eta(t) = c t."""

    c: float

    def __post_init__(self):
        _require(_finite(self.c), "drift c must be finite")


@dataclass(frozen=True)
class BrownianDrift:
    """eta(t) = c t + sigma W(t)."""

    c: float
    sigma: float

    def __post_init__(self):
        _require(_finite(self.c, self.sigma), "c and sigma must be finite")
        _require(self.sigma >= 0, "sigma must be >= 0")


@dataclass(frozen=True)
class CompoundPoissonExp:
    """Drift plus compound Poisson jumps of one sign with Exp(a) magnitudes.

    ``orientation`` is +1 for upward jumps and -1 for downward jumps.
    """

    c: float
    nu: float
    a: float
    orientation: int = 1

    def __post_init__(self):
        _require(_finite(self.c, self.nu, self.a), "parameters must be finite")
        _require(self.nu >= 0, "nu must be >= 0")
        _require(self.a > 0, "a must be > 0")
        _require(self.orientation in (1, -1), "orientation must be +1 or -1")


@dataclass(frozen=True)
class CompoundPoissonBilateral:
    """Drift, optional diffusion, and double-exponential jumps.

    Jumps arrive at rate ``nu``; a jump is upward with probability ``p``
    and then Exp(a_plus), otherwise downward with magnitude Exp(a_minus).
    """

    c: float
    nu: float
    p: float
    a_plus: float
    a_minus: float
    sigma: float = 0.0

    def __post_init__(self):
        _require(_finite(self.c, self.nu, self.p, self.a_plus, self.a_minus, self.sigma),
                 "parameters must be finite")
        _require(self.nu >= 0, "nu must be >= 0")
        _require(0 <= self.p <= 1, "p must lie in [0, 1]")
        _require(self.a_plus > 0 and self.a_minus > 0, "a_plus and a_minus must be > 0")
        _require(self.sigma >= 0, "sigma must be >= 0")


@dataclass(frozen=True)
class StableSubordinator:
    """Positive alpha-stable subordinator with ell(xi) = a xi^alpha.

    ``sign=-1`` denotes the negated subordinator. Its Laplace exponent is
    only the formal negation -a xi^alpha, which finiteness criteria use;
    transform routines refuse it.
    """

    a: float
    alpha: float
    sign: int = 1

    def __post_init__(self):
        _require(_finite(self.a, self.alpha), "parameters must be finite")
        _require(self.a > 0, "scale a must be > 0")
        _require(0 < self.alpha < 1, "alpha must lie strictly inside (0, 1)")
        _require(self.sign in (1, -1), "sign must be +1 or -1")


LevyBlock = Union[Drift, BrownianDrift, CompoundPoissonExp, CompoundPoissonBilateral,
                  StableSubordinator]


def is_formal(block: LevyBlock) -> bool:
    """True for blocks whose Laplace exponent is a formal object only."""
    return isinstance(block, StableSubordinator) and block.sign == -1


def is_subordinator(block: LevyBlock) -> bool:
    """True if the block has a.s. nondecreasing paths."""
    if isinstance(block, Drift):
        return block.c >= 0
    if isinstance(block, CompoundPoissonExp):
        return block.c >= 0 and (block.orientation == 1 or block.nu == 0)
    if isinstance(block, StableSubordinator):
        return block.sign == 1
    if isinstance(block, BrownianDrift):
        return block.sigma == 0 and block.c >= 0
    if isinstance(block, CompoundPoissonBilateral):
        return block.sigma == 0 and block.c >= 0 and (block.p == 1 or block.nu == 0)
    return False


def khintchine_exponent(block: LevyBlock, theta):
    """Lévy-Khintchine exponent psi(theta); accepts scalars or arrays."""
    th = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(th)):
        raise UnsupportedDomain("theta must be finite")
    if isinstance(block, Drift):
        out = -1j * block.c * th
    elif isinstance(block, BrownianDrift):
        out = -1j * block.c * th + 0.5 * block.sigma**2 * th**2
    elif isinstance(block, CompoundPoissonExp):
        s = block.orientation * th
        out = -1j * block.c * th - 1j * s * block.nu / (block.a - 1j * s)
    elif isinstance(block, CompoundPoissonBilateral):
        up = block.p * block.a_plus / (block.a_plus - 1j * th)
        down = (1 - block.p) * block.a_minus / (block.a_minus + 1j * th)
        out = (-1j * block.c * th + 0.5 * block.sigma**2 * th**2
               + block.nu * (1 - up - down))
    elif isinstance(block, StableSubordinator):
        raise UnsupportedDomain("no Fourier exponent is provided for stable subordinators")
    else:
        raise TypeError(f"unknown block {block!r}")
    return out[()] if out.ndim == 0 else out


def laplace_domain(block: LevyBlock) -> tuple[float, float]:
    """Closed/open bounds (lo, hi) of admissible xi; open at finite ends
    except xi=0 for the stable family."""
    if isinstance(block, (Drift, BrownianDrift)):
        return (-np.inf, np.inf)
    if isinstance(block, CompoundPoissonExp):
        return (-block.a, np.inf) if block.orientation == 1 else (-np.inf, block.a)
    if isinstance(block, CompoundPoissonBilateral):
        return (-block.a_plus, block.a_minus)
    if isinstance(block, StableSubordinator):
        return (0.0, np.inf)
    raise TypeError(f"unknown block {block!r}")


def laplace_exponent(block: LevyBlock, xi):
    """Lévy-Laplace exponent ell(xi) with E exp(-xi eta(t)) = exp(-t ell(xi))."""
    x = np.asarray(xi, dtype=float)
    if not np.all(np.isfinite(x)):
        raise UnsupportedDomain("xi must be finite")
    lo, hi = laplace_domain(block)
    if isinstance(block, StableSubordinator):
        if np.any(x < 0):
            raise UnsupportedDomain("stable Laplace exponent needs xi >= 0")
    elif np.any(x <= lo) or np.any(x >= hi):
        raise UnsupportedDomain(f"xi outside the Laplace domain ({lo}, {hi}) of {block!r}")

    if isinstance(block, Drift):
        out = block.c * x
    elif isinstance(block, BrownianDrift):
        out = block.c * x - 0.5 * block.sigma**2 * x**2
    elif isinstance(block, CompoundPoissonExp):
        s = block.orientation * x
        out = block.c * x + block.nu * s / (block.a + s)
    elif isinstance(block, CompoundPoissonBilateral):
        up = block.p * block.a_plus / (block.a_plus + x)
        down = (1 - block.p) * block.a_minus / (block.a_minus - x)
        out = block.c * x - 0.5 * block.sigma**2 * x**2 + block.nu * (1 - up - down)
    else:
        out = block.sign * block.a * x**block.alpha
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Scalar laws (restart points and switch jumps)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Dirac:
    y: float

    def __post_init__(self):
        _require(_finite(self.y), "Dirac location must be finite")


@dataclass(frozen=True)
class Exponential:
    """Exp(rate) on the half line selected by ``sign``."""

    rate: float
    sign: int = 1

    def __post_init__(self):
        _require(_finite(self.rate) and self.rate > 0, "rate must be > 0")
        _require(self.sign in (1, -1), "sign must be +1 or -1")


@dataclass(frozen=True)
class Gaussian:
    mean: float
    sd: float

    def __post_init__(self):
        _require(_finite(self.mean, self.sd), "mean and sd must be finite")
        _require(self.sd >= 0, "sd must be >= 0")


@dataclass(frozen=True)
class TwoPoint:
    """y_a with probability prob_a, else y_b."""

    y_a: float
    y_b: float
    prob_a: float

    def __post_init__(self):
        _require(_finite(self.y_a, self.y_b, self.prob_a), "parameters must be finite")
        _require(0 <= self.prob_a <= 1, "prob_a must lie in [0, 1]")


ScalarLaw = Union[Dirac, Exponential, Gaussian, TwoPoint]


def law_fourier(law: ScalarLaw, theta):
    """g_hat(theta) = int exp(i theta x) g(dx)."""
    th = np.asarray(theta, dtype=float)
    if isinstance(law, Dirac):
        out = np.exp(1j * th * law.y)
    elif isinstance(law, Exponential):
        out = law.rate / (law.rate - 1j * law.sign * th)
    elif isinstance(law, Gaussian):
        out = np.exp(1j * th * law.mean - 0.5 * law.sd**2 * th**2)
    elif isinstance(law, TwoPoint):
        out = law.prob_a * np.exp(1j * th * law.y_a) + (1 - law.prob_a) * np.exp(1j * th * law.y_b)
    else:
        raise TypeError(f"unknown law {law!r}")
    out = np.asarray(out, dtype=complex)
    return out[()] if out.ndim == 0 else out


def law_laplace(law: ScalarLaw, xi):
    """h_tilde(xi) = int exp(-xi y) h(dy)."""
    x = np.asarray(xi, dtype=float)
    if isinstance(law, Dirac):
        out = np.exp(-x * law.y)
    elif isinstance(law, Exponential):
        s = law.sign * x
        if np.any(s <= -law.rate):
            raise UnsupportedDomain(f"xi outside the Laplace domain of {law!r}")
        out = law.rate / (law.rate + s)
    elif isinstance(law, Gaussian):
        out = np.exp(-x * law.mean + 0.5 * law.sd**2 * x**2)
    elif isinstance(law, TwoPoint):
        out = law.prob_a * np.exp(-x * law.y_a) + (1 - law.prob_a) * np.exp(-x * law.y_b)
    else:
        raise TypeError(f"unknown law {law!r}")
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def law_mean(law: ScalarLaw) -> float:
    if isinstance(law, Dirac):
        return law.y
    if isinstance(law, Exponential):
        return law.sign / law.rate
    if isinstance(law, Gaussian):
        return law.mean
    return law.prob_a * law.y_a + (1 - law.prob_a) * law.y_b
