"""Limit law of the renewal regime as t -> infinity.

The limit is the mixture, with weights p0 = lambda1/(lambda0+lambda1) and
p1 = lambda0/(lambda0+lambda1), of x_i + eta_i(tau_i) where tau_i ~ Exp(lambda_i).
For drift, Brownian and one-sided exponential-jump blocks the density is a
finite sum of exponential pieces and atoms, which ``ClosedDensity`` stores
exactly. Gaussian restart points smear each piece into an exponentially
modified Gaussian; other restart laws fall back to a grid convolution.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import log_ndtr, ndtr

from .errors import InvalidCase
from .levy_models import (
    BrownianDrift,
    CompoundPoissonExp,
    Dirac,
    Drift,
    Exponential,
    Gaussian,
    LevyBlock,
    ScalarLaw,
    TwoPoint,
)
from .regime import RegimeModel, Renewal, require_renewal
from .simulate import sample_limit, sample_limit_batch  # noqa: F401  (re-exported)


@dataclass(frozen=True)
class LimitMixture:
    p0: float
    p1: float
    components: tuple  # ((g_i, block_i, lambda_i), ...)


def limit_mixture(model: RegimeModel) -> LimitMixture:
    ren = require_renewal(model)
    l0, l1 = model.lambdas
    return LimitMixture(
        p0=l1 / (l0 + l1),
        p1=l0 / (l0 + l1),
        components=((ren.g0, model.block0, l0), (ren.g1, model.block1, l1)),
    )


# ---------------------------------------------------------------------------
# Closed densities built from exponential pieces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpPiece:
    """coef * exp(-rate (x - shift)) on side*(x - shift) > 0, optionally
    convolved with N(0, sd^2). Requires side*rate > 0."""

    coef: float
    rate: float
    side: int
    shift: float = 0.0
    sd: float = 0.0

    @property
    def mass(self) -> float:
        return self.coef / abs(self.rate)

    def pdf(self, x):
        z = np.asarray(x, dtype=float) - self.shift
        q = abs(self.rate)
        if self.sd == 0:
            with np.errstate(over="ignore"):
                inside = self.side * z > 0
                return np.where(inside, self.coef * np.exp(-self.rate * np.where(inside, z, 0.0)), 0.0)
        s = self.sd
        if self.side > 0:
            return self.coef * np.exp(-q * z + 0.5 * (q * s) ** 2 + log_ndtr(z / s - q * s))
        return self.coef * np.exp(q * z + 0.5 * (q * s) ** 2 + log_ndtr(-z / s - q * s))

    def cdf(self, x):
        z = np.asarray(x, dtype=float) - self.shift
        q = abs(self.rate)
        M = self.mass
        if self.sd == 0:
            if self.side > 0:
                return np.where(z > 0, -M * np.expm1(-q * np.maximum(z, 0.0)), 0.0)
            return np.where(z < 0, M * np.exp(q * np.minimum(z, 0.0)), M)
        s = self.sd
        if self.side > 0:
            return M * (ndtr(z / s) - np.exp(-q * z + 0.5 * (q * s) ** 2 + log_ndtr(z / s - q * s)))
        return M * (ndtr(z / s) + np.exp(q * z + 0.5 * (q * s) ** 2 + log_ndtr(-z / s - q * s)))

    def char(self, theta):
        th = np.asarray(theta, dtype=float)
        return (self.side * self.coef / (self.rate - 1j * th)
                * np.exp(1j * th * self.shift - 0.5 * (self.sd * th) ** 2))

    def moments(self) -> tuple[float, float]:
        """(mean, variance) of the normalized piece."""
        q = abs(self.rate)
        return self.shift + self.side / q, 1.0 / q**2 + self.sd**2


@dataclass(frozen=True)
class Atom:
    loc: float
    mass: float
    sd: float = 0.0

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.sd == 0:
            return np.zeros_like(x)
        return self.mass * np.exp(-0.5 * ((x - self.loc) / self.sd) ** 2) / (self.sd * np.sqrt(2 * np.pi))

    def cdf(self, x, left: bool = False):
        x = np.asarray(x, dtype=float)
        if self.sd == 0:
            hit = x > self.loc if left else x >= self.loc
            return np.where(hit, self.mass, 0.0)
        return self.mass * ndtr((x - self.loc) / self.sd)

    def char(self, theta):
        th = np.asarray(theta, dtype=float)
        return self.mass * np.exp(1j * th * self.loc - 0.5 * (self.sd * th) ** 2)


@dataclass(frozen=True)
class ClosedDensity:
    atoms: tuple = ()
    pieces: tuple = ()

    def pdf(self, x):
        """Density of the continuous part (atoms without smoothing are excluded)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for p in self.pieces:
            out = out + p.pdf(x)
        for a in self.atoms:
            out = out + a.pdf(x)
        return out

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for p in self.pieces:
            out = out + p.cdf(x)
        for a in self.atoms:
            out = out + a.cdf(x)
        return out

    def cdf_left(self, x):
        """P(X < x); differs from ``cdf`` only at unsmoothed atoms."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for p in self.pieces:
            out = out + p.cdf(x)
        for a in self.atoms:
            out = out + a.cdf(x, left=True)
        return out

    def char(self, theta):
        th = np.asarray(theta, dtype=float)
        out = np.zeros(th.shape, dtype=complex)
        for p in self.pieces:
            out = out + p.char(th)
        for a in self.atoms:
            out = out + a.char(th)
        return out[()] if out.ndim == 0 else out

    @property
    def total_mass(self) -> float:
        return sum(p.mass for p in self.pieces) + sum(a.mass for a in self.atoms)

    def moments(self) -> tuple[float, float]:
        parts = [(p.mass, *p.moments()) for p in self.pieces]
        parts += [(a.mass, a.loc, a.sd**2) for a in self.atoms]
        w = np.array([m for m, _, _ in parts])
        mu = np.array([m for _, m, _ in parts])
        var = np.array([v for _, _, v in parts])
        mean = float(np.dot(w, mu) / w.sum())
        second = float(np.dot(w, var + mu**2) / w.sum())
        return mean, second - mean**2

    def scaled(self, w: float) -> "ClosedDensity":
        return ClosedDensity(
            atoms=tuple(replace(a, mass=a.mass * w) for a in self.atoms),
            pieces=tuple(replace(p, coef=p.coef * w) for p in self.pieces),
        )

    def __add__(self, other: "ClosedDensity") -> "ClosedDensity":
        return ClosedDensity(self.atoms + other.atoms, self.pieces + other.pieces)


def _translate(d: ClosedDensity, loc: float, sd: float = 0.0) -> ClosedDensity:
    return ClosedDensity(
        atoms=tuple(replace(a, loc=a.loc + loc, sd=float(np.hypot(a.sd, sd))) for a in d.atoms),
        pieces=tuple(replace(p, shift=p.shift + loc, sd=float(np.hypot(p.sd, sd))) for p in d.pieces),
    )


def convolve_law(d: ClosedDensity, law: ScalarLaw) -> ClosedDensity | None:
    """Exact convolution with a restart law, or None when no closed form is kept."""
    if isinstance(law, Dirac):
        return _translate(d, law.y)
    if isinstance(law, TwoPoint):
        return (_translate(d, law.y_a).scaled(law.prob_a)
                + _translate(d, law.y_b).scaled(1.0 - law.prob_a))
    if isinstance(law, Gaussian):
        return _translate(d, law.mean, law.sd)
    return None


# ---------------------------------------------------------------------------
# Per-state kernels: inverse Fourier transform of 1 / (lambda + psi(theta))
# ---------------------------------------------------------------------------


# drifts below this fraction of the natural scale are treated as zero; the
# resulting transform error is far below double precision for moderate theta
TINY_DRIFT = 1e-13


def telegraph_kernel(lam: float, c: float) -> ClosedDensity:
    if abs(c) <= TINY_DRIFT * lam:
        c = 0.0
    if c > 0:
        return ClosedDensity(pieces=(ExpPiece(1.0 / c, lam / c, 1),))
    if c < 0:
        return ClosedDensity(pieces=(ExpPiece(1.0 / -c, lam / c, -1),))
    return ClosedDensity(atoms=(Atom(0.0, 1.0 / lam),))


def brownian_coefficients(lam: float, c: float, sigma: float) -> tuple[float, float, float]:
    """(A, alpha1, alpha2) with 1/(sigma^2 th^2/2 - i c th + lam)
    = A (1/(alpha2 - i th) - 1/(alpha1 - i th)) and alpha1 < 0 < alpha2."""
    root = np.sqrt(c * c + 2.0 * lam * sigma**2)
    # the root without cancellation, then the other from the product 2 lam / sigma^2
    if c >= 0:
        a1 = (-c - root) / sigma**2
        return 1.0 / root, a1, -2.0 * lam / (sigma**2 * a1)
    a2 = (-c + root) / sigma**2
    return 1.0 / root, -2.0 * lam / (sigma**2 * a2), a2


def brownian_kernel(lam: float, c: float, sigma: float) -> ClosedDensity:
    if sigma <= 0:
        raise InvalidCase("sigma must be > 0; use the telegraph kernel")
    A, a1, a2 = brownian_coefficients(lam, c, sigma)
    return ClosedDensity(pieces=(ExpPiece(A, a2, 1), ExpPiece(A, a1, -1)))


def cpexp_coefficients(lam: float, c: float, nu: float, a: float) -> dict:
    """Roots and weights of the partial fractions for upward Exp(a) jumps."""
    K = a * c + nu + lam
    if abs(c) * a <= TINY_DRIFT * (nu + lam):
        alpha3 = a * lam / (nu + lam)
        return {"alpha3": alpha3, "A3": a * nu / (nu + lam) ** 2, "atom": 1.0 / (nu + lam)}
    D = K * K - 4.0 * a * c * lam
    sq = np.sqrt(D)
    q = 0.5 * (K + np.copysign(sq, K))
    r1, r2 = q / c, a * lam / q
    if c > 0:
        alpha1, alpha2 = min(r1, r2), max(r1, r2)
    else:
        # one root in (0, a), one negative
        alpha1, alpha2 = max(r1, r2), min(r1, r2)
    return {"alpha1": alpha1, "alpha2": alpha2, "A1": (a - alpha1) / sq, "A2": (alpha2 - a) / sq,
            "D": D}


def _mirror(d: ClosedDensity) -> ClosedDensity:
    return ClosedDensity(
        atoms=tuple(replace(x, loc=-x.loc) for x in d.atoms),
        pieces=tuple(replace(p, rate=-p.rate, side=-p.side, shift=-p.shift) for p in d.pieces),
    )


def cpexp_kernel(lam: float, c: float, nu: float, a: float, orientation: int = 1) -> ClosedDensity:
    if orientation == -1:
        return _mirror(cpexp_kernel(lam, -c, nu, a, 1))
    if nu == 0:
        return telegraph_kernel(lam, c)
    co = cpexp_coefficients(lam, c, nu, a)
    if "alpha3" in co:
        return ClosedDensity(atoms=(Atom(0.0, co["atom"]),),
                             pieces=(ExpPiece(co["A3"], co["alpha3"], 1),))
    if c > 0:
        return ClosedDensity(pieces=(ExpPiece(co["A1"], co["alpha1"], 1),
                                     ExpPiece(co["A2"], co["alpha2"], 1)))
    return ClosedDensity(pieces=(ExpPiece(co["A1"], co["alpha1"], 1),
                                 ExpPiece(-co["A2"], co["alpha2"], -1)))


def block_kernel(block: LevyBlock, lam: float) -> ClosedDensity:
    if isinstance(block, Drift):
        return telegraph_kernel(lam, block.c)
    if isinstance(block, BrownianDrift):
        if block.sigma == 0:
            return telegraph_kernel(lam, block.c)
        return brownian_kernel(lam, block.c, block.sigma)
    if isinstance(block, CompoundPoissonExp):
        return cpexp_kernel(lam, block.c, block.nu, block.a, block.orientation)
    raise InvalidCase(f"no closed limit density for block {block!r}")


# ---------------------------------------------------------------------------
# Grid fallback for restart laws without a closed convolution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridDensity:
    """Tabulated density plus an optional part that is still known exactly."""

    x: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)
    exact: ClosedDensity = ClosedDensity()

    def pdf(self, x):
        return np.interp(x, self.x, self.density, left=0.0, right=0.0) + self.exact.pdf(x)

    def _grid_cdf(self, x):
        dx = self.x[1] - self.x[0]
        cum = np.concatenate(([0.0], np.cumsum(0.5 * (self.density[1:] + self.density[:-1]) * dx)))
        return np.interp(x, self.x, cum, left=0.0, right=cum[-1])

    def cdf(self, x):
        return self._grid_cdf(x) + self.exact.cdf(x)

    def cdf_left(self, x):
        return self._grid_cdf(x) + self.exact.cdf_left(x)

    @property
    def total_mass(self) -> float:
        return float(self._grid_cdf(self.x[-1])) + self.exact.total_mass


def _law_cdf(law: ScalarLaw, x: np.ndarray) -> np.ndarray:
    if isinstance(law, Exponential):
        y = np.maximum(law.sign * x, 0.0)
        tail = np.exp(-law.rate * y)
        return 1.0 - tail if law.sign > 0 else tail
    raise InvalidCase(f"grid convolution needs a law with a density, got {law!r}")


def _law_moments(law: ScalarLaw) -> tuple[float, float]:
    if isinstance(law, Exponential):
        return law.sign / law.rate, 1.0 / law.rate**2
    if isinstance(law, Gaussian):
        return law.mean, law.sd**2
    if isinstance(law, Dirac):
        return law.y, 0.0
    m = law.prob_a * law.y_a + (1 - law.prob_a) * law.y_b
    return m, law.prob_a * law.y_a**2 + (1 - law.prob_a) * law.y_b**2 - m * m


def convolve_on_grid(kernel: ClosedDensity, law: ScalarLaw, points: int = 2**12,
                     width: float = 12.0) -> GridDensity:
    km, kv = kernel.moments()
    lm, lv = _law_moments(law)
    mean, sd = km + lm, np.sqrt(kv + lv)
    x = np.linspace(mean - width * sd, mean + width * sd, points)
    dx = x[1] - x[0]
    offsets = (np.arange(points) - points // 2) * dx
    # cell averages keep the mass of the law exact despite its jump at 0
    g = (_law_cdf(law, offsets + 0.5 * dx) - _law_cdf(law, offsets - 0.5 * dx)) / dx
    # kernel cell masses; atoms fall into their cell
    base = (kernel.cdf(x + 0.5 * dx) - kernel.cdf(x - 0.5 * dx)) / dx
    conv = np.convolve(base, g)[points // 2: points // 2 + points] * dx
    return GridDensity(x=x, density=conv)


# ---------------------------------------------------------------------------
# Public constructors
# ---------------------------------------------------------------------------


def _assemble(kernels, laws, l0, l1):
    w = l0 * l1 / (l0 + l1)
    parts = []
    for kern, law in zip(kernels, laws):
        closed = convolve_law(kern.scaled(w), law)
        parts.append(closed if closed is not None else convolve_on_grid(kern.scaled(w), law))
    if all(isinstance(p, ClosedDensity) for p in parts):
        return parts[0] + parts[1]
    grids = [p for p in parts if isinstance(p, GridDensity)]
    exact = sum((p for p in parts if isinstance(p, ClosedDensity)), ClosedDensity())
    if len(grids) == 1:
        return replace(grids[0], exact=exact)
    x = np.linspace(min(g.x[0] for g in grids), max(g.x[-1] for g in grids), grids[0].x.size)
    return GridDensity(x=x, density=sum(np.interp(x, g.x, g.density, left=0.0, right=0.0)
                                        for g in grids))


def limit_density(model: RegimeModel):
    """Limit density for any supported block pair and restart laws."""
    ren: Renewal = require_renewal(model)
    l0, l1 = model.lambdas
    kernels = (block_kernel(model.block0, l0), block_kernel(model.block1, l1))
    return _assemble(kernels, (ren.g0, ren.g1), l0, l1)


def limit_density_telegraph(lambda0, lambda1, c0, c1, g0=Dirac(0.0), g1=Dirac(0.0)):
    return _assemble((telegraph_kernel(lambda0, c0), telegraph_kernel(lambda1, c1)),
                     (g0, g1), lambda0, lambda1)


def limit_density_brownian(lambda0, lambda1, c0, c1, sigma0, sigma1, g0=Dirac(0.0), g1=Dirac(0.0)):
    return _assemble((brownian_kernel(lambda0, c0, sigma0), brownian_kernel(lambda1, c1, sigma1)),
                     (g0, g1), lambda0, lambda1)


def limit_density_cpexp(lambda0, lambda1, c0, c1, nu0, nu1, a0, a1, g0=Dirac(0.0), g1=Dirac(0.0)):
    return _assemble((cpexp_kernel(lambda0, c0, nu0, a0), cpexp_kernel(lambda1, c1, nu1, a1)),
                     (g0, g1), lambda0, lambda1)
