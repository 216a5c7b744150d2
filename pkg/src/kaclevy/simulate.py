"""Exact-in-distribution simulation of Kac-Lévy paths.

Batch functions take a generator and a path count and return arrays. Each
loop iteration draws fixed-shape arrays for all paths, so the draws a path
consumes do not depend on when other paths finish. Scalar wrappers call the
batch versions with one path.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParams
from .levy_models import (
    BrownianDrift,
    CompoundPoissonBilateral,
    CompoundPoissonExp,
    Dirac,
    Drift,
    Exponential,
    Gaussian,
    LevyBlock,
    ScalarLaw,
    StableSubordinator,
    TwoPoint,
    is_subordinator,
)
from .regime import RegimeModel, require_jump, require_renewal
from .rng import child_stream
from .transforms import bigjump_rates

SUBSTEP = 1e-3
QUIET_SEGMENTS = 8


# ---------------------------------------------------------------------------
# Primitive draws
# ---------------------------------------------------------------------------


def sample_law(law: ScalarLaw, n: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(law, Dirac):
        return np.full(n, float(law.y))
    if isinstance(law, Exponential):
        return law.sign * rng.exponential(1.0 / law.rate, size=n)
    if isinstance(law, Gaussian):
        return law.mean + law.sd * rng.standard_normal(n)
    if isinstance(law, TwoPoint):
        return np.where(rng.random(n) < law.prob_a, law.y_a, law.y_b)
    raise TypeError(f"unknown law {law!r}")


def positive_stable(alpha: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Kanter's representation of S >= 0 with E exp(-s S) = exp(-s^alpha)."""
    u = np.pi * rng.random(n)
    e = rng.exponential(size=n)
    log_s = (np.log(np.sin(alpha * u)) - np.log(np.sin(u)) / alpha
             + (1.0 - alpha) / alpha * (np.log(np.sin((1.0 - alpha) * u)) - np.log(e)))
    return np.exp(log_s)


def _gamma_sum(counts, rate, rng):
    # sum of `counts` iid Exp(rate); shape 0 yields 0
    return rng.gamma(counts, 1.0 / rate)


def simulate_block_batch(block: LevyBlock, dt, n: int, rng: np.random.Generator) -> np.ndarray:
    """n independent draws of eta(dt); ``dt`` may be a scalar or an array of shape (n,)."""
    dt = np.broadcast_to(np.asarray(dt, dtype=float), (n,))
    if np.any(dt < 0):
        raise InvalidParams("dt must be >= 0")
    if isinstance(block, Drift):
        return block.c * dt
    if isinstance(block, BrownianDrift):
        return block.c * dt + block.sigma * np.sqrt(dt) * rng.standard_normal(n)
    if isinstance(block, CompoundPoissonExp):
        k = rng.poisson(block.nu * dt)
        return block.c * dt + block.orientation * _gamma_sum(k, block.a, rng)
    if isinstance(block, CompoundPoissonBilateral):
        diffusion = block.sigma * np.sqrt(dt) * rng.standard_normal(n)
        up = _gamma_sum(rng.poisson(block.nu * block.p * dt), block.a_plus, rng)
        down = _gamma_sum(rng.poisson(block.nu * (1 - block.p) * dt), block.a_minus, rng)
        return block.c * dt + diffusion + up - down
    if isinstance(block, StableSubordinator):
        s = positive_stable(block.alpha, n, rng)
        return block.sign * (block.a * dt) ** (1.0 / block.alpha) * s
    raise TypeError(f"unknown block {block!r}")


def simulate_block(block: LevyBlock, dt: float, rng: np.random.Generator) -> float:
    return float(simulate_block_batch(block, dt, 1, rng)[0])


# ---------------------------------------------------------------------------
# Path records
# ---------------------------------------------------------------------------


@dataclass
class PathSample:
    switch_times: list = field(default_factory=list)
    regimes: list = field(default_factory=list)
    segment_values: list = field(default_factory=list)
    terminal: float = 0.0


def simulate_path(model: RegimeModel, t: float, start_regime: int,
                  rng: np.random.Generator) -> PathSample:
    """One fully recorded path on [0, t] (either variant)."""
    if t < 0:
        raise InvalidParams("t must be >= 0")
    laws = model.laws()
    regime = start_regime
    now = 0.0
    x = float(sample_law(laws[regime], 1, rng)[0]) if not model.is_jump else 0.0
    out = PathSample(regimes=[regime])
    while True:
        hold = rng.exponential(1.0 / model.lambdas[regime])
        seg = min(hold, t - now)
        x += simulate_block(model.blocks[regime], seg, rng)
        out.segment_values.append(x)
        if now + hold >= t:
            break
        now += hold
        out.switch_times.append(now)
        if model.is_jump:
            x += float(sample_law(laws[regime], 1, rng)[0])
        regime = 1 - regime
        if not model.is_jump:
            x = float(sample_law(laws[regime], 1, rng)[0])
        out.regimes.append(regime)
    out.terminal = x
    return out


# ---------------------------------------------------------------------------
# Terminal values, batched
# ---------------------------------------------------------------------------


def simulate_renewal_batch(model: RegimeModel, t, start_regime: int, n: int,
                           rng: np.random.Generator, return_info: bool = False):
    """X(t) for the renewal regime; only the final segment matters."""
    ren = require_renewal(model)
    t = np.broadcast_to(np.asarray(t, dtype=float), (n,))
    lam = np.array(model.lambdas)
    regime = np.full(n, start_regime, dtype=np.int64)
    seg_start = np.zeros(n)
    switches = np.zeros(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    while active.any():
        ends = seg_start + rng.exponential(size=n) / lam[regime]
        switch = active & (ends < t)
        seg_start = np.where(switch, ends, seg_start)
        regime = np.where(switch, 1 - regime, regime)
        switches += switch
        active = switch
    rem = t - seg_start
    start = np.where(regime == 0, sample_law(ren.g0, n, rng), sample_law(ren.g1, n, rng))
    inc = np.where(regime == 0, simulate_block_batch(model.block0, rem, n, rng),
                   simulate_block_batch(model.block1, rem, n, rng))
    values = start + inc
    if return_info:
        return values, regime, switches
    return values


def simulate_jump_batch(model: RegimeModel, t, start_regime, n: int,
                        rng: np.random.Generator, return_info: bool = False):
    """X(t) for the jump regime; ``t`` and ``start_regime`` broadcast over paths.

    The jump added when leaving state i is drawn from h_i.
    """
    jump = require_jump(model)
    t = np.broadcast_to(np.asarray(t, dtype=float), (n,))
    lam = np.array(model.lambdas)
    regime = np.broadcast_to(np.asarray(start_regime, dtype=np.int64), (n,)).copy()
    now = np.zeros(n)
    x = np.zeros(n)
    switches = np.zeros(n, dtype=np.int64)
    active = t > 0
    while active.any():
        hold = rng.exponential(size=n) / lam[regime]
        end = now + hold
        seg = np.where(active, np.minimum(hold, t - now), 0.0)
        inc0 = simulate_block_batch(model.block0, np.where(regime == 0, seg, 0.0), n, rng)
        inc1 = simulate_block_batch(model.block1, np.where(regime == 1, seg, 0.0), n, rng)
        x += np.where(regime == 0, inc0, inc1) * active
        switch = active & (end < t)
        y = np.where(regime == 0, sample_law(jump.h0, n, rng), sample_law(jump.h1, n, rng))
        x += np.where(switch, y, 0.0)
        now = np.where(switch, end, now)
        regime = np.where(switch, 1 - regime, regime)
        switches += switch
        active = switch
    if return_info:
        return x, regime, switches
    return x


def simulate_renewal(model: RegimeModel, t: float, start_regime: int, rng) -> float:
    return float(simulate_renewal_batch(model, t, start_regime, 1, rng)[0])


def simulate_jump(model: RegimeModel, t: float, start_regime: int, rng) -> float:
    return float(simulate_jump_batch(model, t, start_regime, 1, rng)[0])


def simulate_subordinated_batch(x_model: RegimeModel, z_model: RegimeModel, t: float,
                                start_regimes: tuple[int, int], n: int,
                                rng: np.random.Generator) -> np.ndarray:
    """X(Z(t)) with X and Z independent; ``start_regimes`` = (state of X, state of Z)."""
    for b in z_model.blocks:
        if not is_subordinator(b):
            raise InvalidParams(f"time-change block {b!r} is not a subordinator")
    z = simulate_jump_batch(z_model, t, start_regimes[1], n, rng)
    return simulate_jump_batch(x_model, z, start_regimes[0], n, child_stream(rng))


def simulate_subordinated(x_model, z_model, t, start_regimes, rng) -> float:
    return float(simulate_subordinated_batch(x_model, z_model, t, start_regimes, 1, rng)[0])


def sample_limit_batch(model: RegimeModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """Exact draws of the renewal limit law: mixture over states of x_i + eta_i(tau_i)."""
    ren = require_renewal(model)
    l0, l1 = model.lambdas
    pick1 = rng.random(n) < l0 / (l0 + l1)
    tau = np.where(pick1, rng.exponential(1.0 / l1, n), rng.exponential(1.0 / l0, n))
    start = np.where(pick1, sample_law(ren.g1, n, rng), sample_law(ren.g0, n, rng))
    eta = np.where(pick1, simulate_block_batch(model.block1, tau, n, rng),
                   simulate_block_batch(model.block0, tau, n, rng))
    return start + eta


def sample_limit(model: RegimeModel, rng) -> float:
    return float(sample_limit_batch(model, 1, rng)[0])


# ---------------------------------------------------------------------------
# Switching triggered by big jumps
# ---------------------------------------------------------------------------


def _truncated_exp_sum(counts, rate, bound, rng):
    total = int(counts.sum())
    if total == 0:
        return np.zeros(counts.shape[0])
    u = rng.random(total)
    vals = -np.log1p(-u * -np.expm1(-rate * bound)) / rate
    owner = np.repeat(np.arange(counts.shape[0]), counts)
    return np.bincount(owner, weights=vals, minlength=counts.shape[0])


def _bigjump_increment(block: CompoundPoissonBilateral, regime: int, R: float, dt, n, rng):
    """Increment over dt of the block with its switching tail removed."""
    diffusion = block.sigma * np.sqrt(dt) * rng.standard_normal(n)
    up_rate = block.nu * block.p
    down_rate = block.nu * (1 - block.p)
    if regime == 0:
        up = _gamma_sum(rng.poisson(up_rate * dt), block.a_plus, rng)
        kept = -np.expm1(-block.a_minus * R)
        down = _truncated_exp_sum(rng.poisson(down_rate * kept * dt), block.a_minus, R, rng)
    else:
        down = _gamma_sum(rng.poisson(down_rate * dt), block.a_minus, rng)
        kept = -np.expm1(-block.a_plus * R)
        up = _truncated_exp_sum(rng.poisson(up_rate * kept * dt), block.a_plus, R, rng)
    return block.c * dt + diffusion + up - down


def simulate_bigjump_batch(block0, block1, R0: float, R1: float, t: float, start_regime: int,
                           n: int, rng: np.random.Generator,
                           include_trigger: bool = True) -> np.ndarray:
    """State 0 leaves at its first jump below -R0, state 1 at its first jump above R1."""
    lam = np.array(bigjump_rates(block0, block1, R0, R1))
    blocks = (block0, block1)
    regime = np.full(n, start_regime, dtype=np.int64)
    now = np.zeros(n)
    x = np.zeros(n)
    active = np.ones(n, dtype=bool) if t > 0 else np.zeros(n, dtype=bool)
    while active.any():
        with np.errstate(divide="ignore"):
            hold = rng.exponential(size=n) / lam[regime]
        end = now + hold
        seg = np.where(active, np.minimum(hold, t - now), 0.0)
        inc0 = _bigjump_increment(block0, 0, R0, np.where(regime == 0, seg, 0.0), n, rng)
        inc1 = _bigjump_increment(block1, 1, R1, np.where(regime == 1, seg, 0.0), n, rng)
        x += np.where(regime == 0, inc0, inc1) * active
        switch = active & (end < t)
        if include_trigger:
            trig0 = -(R0 + rng.exponential(1.0 / blocks[0].a_minus, n))
            trig1 = R1 + rng.exponential(1.0 / blocks[1].a_plus, n)
            x += np.where(switch, np.where(regime == 0, trig0, trig1), 0.0)
        now = np.where(switch, end, now)
        regime = np.where(switch, 1 - regime, regime)
        active = switch
    return x


# ---------------------------------------------------------------------------
# Exponential functional
# ---------------------------------------------------------------------------


def _segment_integral_drift(x, c, seg):
    """int_0^seg exp(-(x + c s)) ds, exact."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        factor = np.where(c == 0, seg, -np.expm1(-c * seg) / np.where(c == 0, 1.0, c))
        return np.exp(-x) * factor


def _expfun_telegraph_batch(model, n, rng, start_regime, rel_tol, max_horizon):
    jump = model.variant
    c = np.array([model.block0.c, model.block1.c], dtype=float)
    lam = np.array(model.lambdas)
    regime = np.full(n, start_regime, dtype=np.int64)
    now = np.zeros(n)
    x = np.zeros(n)
    total = np.zeros(n)
    quiet = np.zeros(n, dtype=np.int64)
    truncated = np.zeros(n, dtype=bool)
    active = np.ones(n, dtype=bool)
    while active.any():
        hold = rng.exponential(size=n) / lam[regime]
        y = np.where(regime == 0, sample_law(jump.h0, n, rng), sample_law(jump.h1, n, rng))
        end = now + hold
        hit_horizon = end >= max_horizon
        seg = np.where(hit_horizon, max_horizon - now, hold)
        cr = c[regime]
        contrib = np.where(active, _segment_integral_drift(x, cr, seg), 0.0)
        total += contrib
        quiet = np.where(contrib < rel_tol * total, quiet + 1, 0)
        x = np.where(active, x + cr * seg, x)
        stop = active & (hit_horizon | (quiet >= QUIET_SEGMENTS))
        truncated |= active & hit_horizon & (quiet < QUIET_SEGMENTS)
        move = active & ~stop
        x = np.where(move, x + y, x)
        now = np.where(move, end, now)
        regime = np.where(move, 1 - regime, regime)
        active = move
    return total, truncated


def _segment_integral_general(block, x, seg, rng):
    """Returns (int_0^seg exp(-X), X at seg end) for one path segment starting at x."""
    if isinstance(block, Drift):
        return float(_segment_integral_drift(x, block.c, seg)), x + block.c * seg
    if isinstance(block, CompoundPoissonExp) or (
            isinstance(block, CompoundPoissonBilateral) and block.sigma == 0):
        # linear between jump epochs: exact
        acc = 0.0
        left = seg
        while True:
            wait = rng.exponential(1.0 / block.nu) if block.nu > 0 else np.inf
            if wait >= left:
                acc += float(_segment_integral_drift(x, block.c, left))
                return acc, x + block.c * left
            acc += float(_segment_integral_drift(x, block.c, wait))
            x += block.c * wait
            left -= wait
            if isinstance(block, CompoundPoissonExp):
                x += block.orientation * rng.exponential(1.0 / block.a)
            elif rng.random() < block.p:
                x += rng.exponential(1.0 / block.a_plus)
            else:
                x -= rng.exponential(1.0 / block.a_minus)
    # diffusive or infinite-activity blocks: trapezoid on a grid anchored at the segment start
    steps = int(np.floor(seg / SUBSTEP + 1e-12))
    acc = 0.0
    if steps:
        incs = simulate_block_batch(block, SUBSTEP, steps, rng)
        path = x + np.concatenate(([0.0], np.cumsum(incs)))
        vals = np.exp(-path)
        acc = float(0.5 * SUBSTEP * (vals[:-1] + vals[1:]).sum())
        x = float(path[-1])
    return acc, x


def _expfun_general_path(model, rng, start_regime, rel_tol, max_horizon):
    jump = model.variant
    regime = start_regime
    now = x = total = 0.0
    quiet = 0
    while True:
        hold = rng.exponential(1.0 / model.lambdas[regime])
        hit = now + hold >= max_horizon
        seg = max_horizon - now if hit else hold
        contrib, x = _segment_integral_general(model.blocks[regime], x, seg, rng)
        total += contrib
        quiet = quiet + 1 if contrib < rel_tol * total else 0
        if quiet >= QUIET_SEGMENTS:
            return total, False
        if hit:
            return total, True
        x += float(sample_law((jump.h0, jump.h1)[regime], 1, rng)[0])
        now += hold
        regime = 1 - regime


def simulate_expfun_batch(model: RegimeModel, n: int, rng: np.random.Generator,
                          start_regime: int = 0, rel_tol: float = 1e-12,
                          max_horizon: float = 1e4):
    """Draws of int_0^infinity exp(-X(t)) dt, truncated at ``max_horizon``.

    A path stops once QUIET_SEGMENTS consecutive segments each add less than
    ``rel_tol`` times the running total. Returns (values, truncated flags).
    """
    require_jump(model)
    if not (0 < rel_tol < 1):
        raise InvalidParams("rel_tol must lie in (0, 1)")
    if not max_horizon > 0:
        raise InvalidParams("max_horizon must be > 0")
    if isinstance(model.block0, Drift) and isinstance(model.block1, Drift):
        return _expfun_telegraph_batch(model, n, rng, start_regime, rel_tol, max_horizon)
    keys = rng.integers(0, 2**63, size=(n, 2), dtype=np.int64).astype(np.uint64)
    values = np.empty(n)
    flags = np.empty(n, dtype=bool)
    for i in range(n):
        path_rng = np.random.Generator(np.random.Philox(key=keys[i]))
        values[i], flags[i] = _expfun_general_path(model, path_rng, start_regime, rel_tol,
                                                   max_horizon)
    return values, flags


def simulate_expfun(model: RegimeModel, rel_tol: float, max_horizon: float, rng,
                    start_regime: int = 0) -> tuple[float, bool]:
    values, flags = simulate_expfun_batch(model, 1, rng, start_regime, rel_tol, max_horizon)
    return float(values[0]), bool(flags[0])
