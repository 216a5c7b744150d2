"""Task runners behind the CLI; each returns a Grid (or a report for verify)."""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from ..errors import InvalidCase, InvalidParams
from ..expfunctional import Status, expfun_cdf, expfun_density_eval, telegraph_expfun_density
from ..levy_models import Dirac, Drift
from ..limits import limit_density
from ..rng import run_batches
from ..simulate import simulate_jump_batch, simulate_renewal_batch
from ..transforms import jump_mgf, renewal_char
from .config import Axis, RunConfig
from .output import Grid
from .verify import McReport, complex_mean_se, real_mean_se, run_verify

DEFAULT_AXES = {
    "t": Axis(values=(1.0,)),
    "theta": Axis(start=-5.0, stop=5.0, num=11),
    "xi": Axis(values=(0.1, 0.5, 1.0)),
    "x": Axis(start=-5.0, stop=5.0, num=101),
}


def _axis(config: RunConfig, name: str) -> np.ndarray:
    return config.grid.get(name, DEFAULT_AXES[name]).points()


def _mesh(a: np.ndarray, b: np.ndarray):
    A, B = np.meshgrid(a, b, indexing="ij")
    return A.ravel(), B.ravel()


def task_transform(config: RunConfig) -> Grid:
    model = config.model.build()
    start = config.start_regime
    ts = _axis(config, "t")
    if not model.is_jump:
        thetas = _axis(config, "theta")
        vals = np.concatenate([np.atleast_1d(renewal_char(model, t, thetas)[start]) for t in ts])
        T, TH = _mesh(ts, thetas)
        return Grid({"t": T, "theta": TH}, vals)
    xis = _axis(config, "xi")
    vals = np.array([jump_mgf(model, t, xi)[start] for t in ts for xi in xis])
    T, XI = _mesh(ts, xis)
    return Grid({"t": T, "xi": XI}, vals)


def task_limit_density(config: RunConfig) -> Grid:
    model = config.model.build()
    dens = limit_density(model)
    x = _axis(config, "x")
    return Grid({"x": x}, np.asarray(dens.pdf(x), dtype=complex), {"cdf": dens.cdf(x)})


def _telegraph_args(model):
    jump = model.variant
    if not (isinstance(model.block0, Drift) and isinstance(model.block1, Drift)
            and isinstance(jump.h0, Dirac) and isinstance(jump.h1, Dirac)):
        raise InvalidCase("closed-form expfun densities need drift blocks and Dirac jumps")
    return (model.lambda0, model.lambda1, model.block0.c, model.block1.c, jump.h0.y, jump.h1.y)


def task_expfun(config: RunConfig) -> Grid:
    model = config.model.build()
    if not model.is_jump:
        raise InvalidParams("expfun needs a jump-variant model")
    dens = telegraph_expfun_density(*_telegraph_args(model))
    if dens is Status.INFINITE_AS:
        empty = np.zeros(0)
        return Grid({"t": empty}, empty.astype(complex), {"cdf": empty})
    d = dens[config.start_regime]
    if "x" in config.grid:
        t = config.grid["x"].points()
    else:
        hi = d.upper if math.isfinite(d.upper) else d.lower + 10.0
        t = np.linspace(d.lower, hi, 101)
    return Grid({"t": t}, np.asarray(expfun_density_eval(d, t), dtype=complex),
                {"cdf": expfun_cdf(d, t)})


def task_simulate(config: RunConfig) -> Grid:
    """Monte-Carlo estimates of the transform on the same grid as ``transform``."""
    model = config.model.build()
    mc = config.mc
    start = config.start_regime
    ts = _axis(config, "t")
    key = "xi" if model.is_jump else "theta"
    coords, vals, ses = {"t": [], key: []}, [], []
    for k, t in enumerate(ts):
        if model.is_jump:
            x = run_batches(lambda rng, n: simulate_jump_batch(model, t, start, n, rng),
                            mc.n_paths, mc.seed, tag=k, workers=mc.workers)
            for xi in _axis(config, "xi"):
                est, se = real_mean_se(np.exp(-xi * x))
                coords["t"].append(t)
                coords[key].append(xi)
                vals.append(est)
                ses.append(se)
        else:
            x = run_batches(lambda rng, n: simulate_renewal_batch(model, t, start, n, rng),
                            mc.n_paths, mc.seed, tag=k, workers=mc.workers)
            for th in _axis(config, "theta"):
                est, se = complex_mean_se(np.exp(1j * th * x))
                coords["t"].append(t)
                coords[key].append(th)
                vals.append(est)
                ses.append(se)
    return Grid({k: np.array(v) for k, v in coords.items()}, np.array(vals, dtype=complex),
                {"se": np.array(ses)})


def task_verify(config: RunConfig) -> McReport:
    mc = config.mc
    return run_verify(config.suite, seed=mc.seed, workers=mc.workers, paths=mc.paths)


TASK_RUNNERS = {
    "transform": task_transform,
    "limit-density": task_limit_density,
    "expfun": task_expfun,
    "simulate": task_simulate,
    "verify": task_verify,
}


def run_task(config: RunConfig):
    return TASK_RUNNERS[config.task](config)


def with_overrides(config: RunConfig, seed=None, paths=None, fmt=None, workers=None,
                   out=None) -> RunConfig:
    mc = config.mc
    if seed is not None:
        mc = replace(mc, seed=seed)
    if paths is not None:
        mc = replace(mc, paths=paths)
    if workers is not None:
        mc = replace(mc, workers=workers)
    return replace(config, mc=mc, format=fmt or config.format,
                   output=out if out is not None else config.output)
