"""Monte-Carlo and closed-form cross-checks, grouped into named suites.

Every check produces a record with the analytic value, the estimate, the
statistic and its threshold; a check passes when statistic <= threshold.
Each Monte-Carlo call owns a fixed stream tag, so a suite gives the same
numbers whether it runs alone or inside ``all``, and for any worker count.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import quad

from ..expfunctional import (
    Status,
    StableVariant,
    expfun_cdf,
    expfun_density_eval,
    expfun_mean,
    finiteness_certificate,
    recheck_certificate,
    stable_finiteness,
    telegraph_expfun_density,
    telegraph_jump_model,
)
from ..levy_models import (
    BrownianDrift,
    CompoundPoissonBilateral,
    CompoundPoissonExp,
    Dirac,
    Drift,
    Exponential,
    Gaussian,
    StableSubordinator,
    TwoPoint,
    laplace_exponent,
    law_laplace,
)
from ..limits import limit_density
from ..regime import Jump, RegimeModel, Renewal, exponent_matrix
from ..rng import run_batches
from ..simulate import (
    sample_limit_batch,
    simulate_expfun_batch,
    simulate_jump_batch,
    simulate_renewal_batch,
)
from ..transforms import jump_mgf, renewal_char, telegraph_mgf_classical

Z_THRESHOLD = 3.0
KS_LEVEL = 1.63  # 1% critical value of sqrt(N) * KS

FIG1_MODEL = RegimeModel(2.0, 1.0, BrownianDrift(1.0, 1.0), BrownianDrift(-1.0, 2.0),
                         Renewal(Dirac(0.0), Dirac(0.0)))
FIG2_PARAMS = (2.0, 1.0, 1.0, 0.5, -0.5, 0.5)
FIG3_PARAMS = (1.0, 1.0, 2.0, -0.1, -0.5, 0.5)
INFINITE_PARAMS = (1.0, 1.0, 1.0, -1.0, 0.0, 0.0)


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


@dataclass
class CheckRecord:
    name: str
    kind: str
    statistic: float
    threshold: float
    analytic: object = None
    estimate: object = None
    se: float | None = None
    skipped: bool = False
    note: str = ""
    passed: bool = field(init=False)

    def __post_init__(self):
        self.statistic = float(self.statistic)
        self.threshold = float(self.threshold)
        self.passed = bool(self.skipped or self.statistic <= self.threshold)

    def to_json(self) -> dict:
        return {k: _jsonable(v) for k, v in asdict(self).items()}


@dataclass
class McReport:
    suite: str
    seed: int
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> dict:
        return {
            "passed": self.passed,
            "checks": len(self.checks),
            "failed": sum(not c.passed for c in self.checks),
            "skipped": sum(c.skipped for c in self.checks),
        }

    def to_json(self) -> dict:
        return {"suite": self.suite, "seed": self.seed,
                "checks": [c.to_json() for c in self.checks], "summary": self.summary()}

    def render(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"


@dataclass
class VerifyContext:
    seed: int = 42
    workers: int = 1
    paths: int | None = None  # overrides every default sample size when set

    def n(self, default: int) -> int:
        return default if self.paths is None else self.paths

    def ks_threshold(self, stated: float, n: int) -> float:
        return max(stated, KS_LEVEL / math.sqrt(n))

    def mc(self, fn, n: int, tag: int) -> np.ndarray:
        return run_batches(fn, n, self.seed, tag=tag, workers=self.workers)


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------


def ks_statistic(samples, cdf, cdf_left=None) -> float:
    """sup |F_n - F| with atoms handled exactly: both one-sided limits are
    compared at every distinct sample value."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    values, counts = np.unique(x, return_counts=True)
    upper = np.cumsum(counts) / n
    lower = upper - counts / n
    F = np.asarray(cdf(values), dtype=float)
    F_left = F if cdf_left is None else np.asarray(cdf_left(values), dtype=float)
    return float(max(np.max(np.abs(upper - F)), np.max(np.abs(lower - F_left))))


def complex_mean_se(z: np.ndarray) -> tuple[complex, float]:
    """Mean of complex samples and the standard error of its modulus error:
    sqrt((var Re + var Im) / N)."""
    n = z.size
    se = math.sqrt((np.var(z.real, ddof=1) + np.var(z.imag, ddof=1)) / n)
    return complex(z.mean()), se


def real_mean_se(v: np.ndarray) -> tuple[float, float]:
    return float(v.mean()), float(np.std(v, ddof=1) / math.sqrt(v.size))


def _z_record(name, analytic, estimate, se):
    stat = abs(estimate - analytic) / se if se > 0 else (0.0 if estimate == analytic else math.inf)
    return CheckRecord(name, "z", stat, Z_THRESHOLD, analytic, estimate, se)


def _verdict_record(name, expected, got):
    return CheckRecord(name, "verdict", 0.0 if expected == got else 1.0, 0.0, expected, got)


def _rel_record(name, analytic, estimate, tol):
    stat = abs(estimate - analytic) / max(abs(analytic), 1e-300)
    return CheckRecord(name, "rel", stat, tol, analytic, estimate)


def _abs_record(name, analytic, estimate, tol):
    return CheckRecord(name, "abs", abs(estimate - analytic), tol, analytic, estimate)


def density_mass(d) -> float:
    """Quadrature mass of an expfun density, splitting at the singular end."""
    f = lambda t: expfun_density_eval(d, t)  # noqa: E731
    opts = dict(limit=400, epsabs=1e-13, epsrel=1e-13)
    if math.isinf(d.upper):
        mid = d.lower + 1.0
        return quad(f, d.lower, mid, **opts)[0] + quad(f, mid, math.inf, **opts)[0]
    mid = 0.5 * (d.lower + d.upper)
    return quad(f, d.lower, mid, **opts)[0] + quad(f, mid, d.upper, **opts)[0]


def density_first_moment(d) -> float:
    f = lambda t: t * expfun_density_eval(d, t)  # noqa: E731
    opts = dict(limit=400, epsabs=1e-13, epsrel=1e-13)
    if math.isinf(d.upper):
        mid = d.lower + 1.0
        return quad(f, d.lower, mid, **opts)[0] + quad(f, mid, math.inf, **opts)[0]
    mid = 0.5 * (d.lower + d.upper)
    return quad(f, d.lower, mid, **opts)[0] + quad(f, mid, d.upper, **opts)[0]


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def suite_fig1(ctx: VerifyContext) -> list[CheckRecord]:
    """Renewal regime: transform at t=1 and convergence to the limit law."""
    m = FIG1_MODEL
    out = []
    thetas = np.linspace(-3.5, 3.5, 8)
    n = ctx.n(100_000)
    for start in (0, 1):
        x = ctx.mc(lambda rng, k: simulate_renewal_batch(m, 1.0, start, k, rng), n, tag=100 + start)
        exact = renewal_char(m, 1.0, thetas)[start]
        for th, ex in zip(thetas, exact):
            est, se = complex_mean_se(np.exp(1j * th * x))
            out.append(_z_record(f"fig1/renewal_char/start{start}/theta={th:+.2f}", complex(ex), est, se))

    dens = limit_density(m)
    out.append(_abs_record("fig1/limit/total_mass", 1.0, dens.total_mass, 1e-10))
    quad_mass = sum(quad(dens.pdf, lo, hi, limit=200, epsabs=1e-13, epsrel=1e-13)[0]
                    for lo, hi in ((-math.inf, 0.0), (0.0, math.inf)))
    out.append(_abs_record("fig1/limit/quadrature_mass", 1.0, quad_mass, 1e-10))
    for xq in (-2.0, -0.5, 0.5, 2.0):
        lo, hi = (-math.inf, xq) if xq < 0 else (0.0, xq)
        base = 0.0 if xq < 0 else float(dens.cdf(0.0))
        val = base + quad(dens.pdf, lo, hi, limit=200, epsabs=1e-13, epsrel=1e-13)[0]
        out.append(_abs_record(f"fig1/limit/cdf_vs_quadrature/x={xq:+.1f}", val, float(dens.cdf(xq)), 1e-10))

    n_lim = ctx.n(100_000)
    thr = ctx.ks_threshold(0.0163, n_lim)
    x30 = ctx.mc(lambda rng, k: simulate_renewal_batch(m, 30.0, 0, k, rng), n_lim, tag=110)
    out.append(CheckRecord("fig1/limit/ks_t30", "ks", ks_statistic(x30, dens.cdf, dens.cdf_left), thr))
    xs = ctx.mc(lambda rng, k: sample_limit_batch(m, k, rng), n_lim, tag=111)
    out.append(CheckRecord("fig1/limit/ks_sampler", "ks", ks_statistic(xs, dens.cdf, dens.cdf_left), thr))
    return out


def suite_jump(ctx: VerifyContext) -> list[CheckRecord]:
    """Jump regime transform against simulation on the Fig. 2 model."""
    m = telegraph_jump_model(*FIG2_PARAMS)
    out = []
    n = ctx.n(1_000_000)
    for i, t in enumerate((0.5, 1.0, 2.0)):
        for start in (0, 1):
            x = ctx.mc(lambda rng, k: simulate_jump_batch(m, t, start, k, rng), n,
                       tag=200 + 2 * i + start)
            for xi in (0.1, 0.5, 1.0):
                est, se = real_mean_se(np.exp(-xi * x))
                exact = jump_mgf(m, t, xi)[start]
                out.append(_z_record(f"jump/mgf/start{start}/t={t}/xi={xi}", exact, est, se))
    return out


REDUCTION_MODELS = ((2.0, 1.0, 1.0, -1.0), (0.5, 3.0, 2.0, 0.5), (1.0, 1.0, -0.3, 1.7))


def suite_reduction(ctx: VerifyContext) -> list[CheckRecord]:
    """Jump regime with zero jumps equals the classical telegraph formulas."""
    out = []
    ts = (0.1, 0.5, 1.0, 2.0, 5.0)
    xis = (-1.0, -0.5, 0.1, 0.5, 1.0)
    for lam0, lam1, c0, c1 in REDUCTION_MODELS:
        m = RegimeModel(lam0, lam1, Drift(c0), Drift(c1), Jump(Dirac(0.0), Dirac(0.0)))
        worst = 0.0
        for t in ts:
            for xi in xis:
                a = np.array(list(jump_mgf(m, t, xi)))
                b = np.array(list(telegraph_mgf_classical(lam0, lam1, c0, c1, t, xi)))
                worst = max(worst, float(np.max(np.abs(a - b) / np.abs(b))))
        out.append(CheckRecord(f"reduction/telegraph/lambda=({lam0},{lam1})/c=({c0},{c1})",
                               "rel", worst, 1e-12))
    return out


def random_jump_model(rng: np.random.Generator) -> RegimeModel:
    """Jump-regime model whose Laplace domains all contain [-0.5, 0.5]."""

    def block():
        c = rng.uniform(-2, 2)
        kind = rng.integers(4)
        if kind == 0:
            return Drift(c)
        if kind == 1:
            return BrownianDrift(c, rng.uniform(0.1, 1.5))
        if kind == 2:
            return CompoundPoissonExp(c, rng.uniform(0.1, 3), rng.uniform(1, 4), int(rng.choice([-1, 1])))
        return CompoundPoissonBilateral(c, rng.uniform(0.1, 3), rng.uniform(0, 1), rng.uniform(1, 4),
                                        rng.uniform(1, 4), rng.uniform(0, 1))

    def law():
        kind = rng.integers(4)
        if kind == 0:
            return Dirac(rng.uniform(-1, 1))
        if kind == 1:
            return Exponential(rng.uniform(1, 4), int(rng.choice([-1, 1])))
        if kind == 2:
            return Gaussian(rng.uniform(-1, 1), rng.uniform(0, 1))
        return TwoPoint(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0, 1))

    return RegimeModel(rng.uniform(0.2, 3), rng.uniform(0.2, 3), block(), block(), Jump(law(), law()))


def mgf_ode_residual(m: RegimeModel, t: float, xi: float, h: float = 1e-5) -> float:
    """Relative residual of dL/dt = -M L by central differences."""
    L = np.array(list(jump_mgf(m, t, xi)))
    dL = (np.array(list(jump_mgf(m, t + h, xi))) - np.array(list(jump_mgf(m, t - h, xi)))) / (2 * h)
    M = exponent_matrix(m, xi).as_array()
    rhs = -M @ L
    scale = np.abs(M) @ np.abs(L)
    return float(np.max(np.abs(dL - rhs) / scale))


def mgf_integral_residual(m: RegimeModel, t: float, xi: float) -> float:
    """Relative residual of the renewal-type integral equations for L_0, L_1."""
    jump = m.variant
    ell = (laplace_exponent(m.block0, xi), laplace_exponent(m.block1, xi))
    h = (law_laplace(jump.h0, xi), law_laplace(jump.h1, xi))
    L = jump_mgf(m, t, xi)
    worst = 0.0
    for i in (0, 1):
        k = m.lambdas[i] + ell[i]
        integrand = lambda s, i=i, k=k: math.exp(-k * s) * jump_mgf(m, t - s, xi)[1 - i]  # noqa: E731
        integral = quad(integrand, 0.0, t, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        rhs = math.exp(-k * t) + m.lambdas[i] * h[i] * integral
        worst = max(worst, abs(L[i] - rhs) / abs(L[i]))
    return worst


def suite_residuals(ctx: VerifyContext, count: int = 10) -> list[CheckRecord]:
    """ODE and integral-equation residuals of the jump transform on random models."""
    gen = np.random.default_rng(20_240_501)
    out = []
    for j in range(count):
        m = random_jump_model(gen)
        t = float(gen.uniform(0.2, 3.0))
        xi = float(gen.uniform(-0.5, 0.5))
        out.append(CheckRecord(f"residuals/ode/model{j}", "rel", mgf_ode_residual(m, t, xi), 1e-6))
        out.append(CheckRecord(f"residuals/integral/model{j}", "rel",
                               mgf_integral_residual(m, t, xi), 1e-6))
    return out


def _expfun_draws(ctx, m, start, n, tag, rel_tol=1e-12, max_horizon=1e4):
    def fn(rng, k):
        v, tr = simulate_expfun_batch(m, k, rng, start_regime=start, rel_tol=rel_tol,
                                      max_horizon=max_horizon)
        return np.column_stack([v, tr])

    arr = ctx.mc(fn, n, tag)
    return arr[:, 0], arr[:, 1].astype(bool)


def _expfun_density_checks(ctx, prefix, params, tag0, support_check: bool):
    m = telegraph_jump_model(*params)
    dens = telegraph_expfun_density(*params)
    out = []
    n = ctx.n(10_000)
    thr = ctx.ks_threshold(0.02, n)
    for start, d in enumerate(dens):
        out.append(_abs_record(f"{prefix}/f{start}/normalization", 1.0, density_mass(d), 1e-8))
        out.append(_abs_record(f"{prefix}/f{start}/cdf_at_infinity", 1.0, float(expfun_cdf(d, math.inf)), 1e-8))
        v, tr = _expfun_draws(ctx, m, start, n, tag0 + start)
        kept = v[~tr]
        out.append(CheckRecord(f"{prefix}/f{start}/truncated_draws", "count", int(tr.sum()), 0,
                               note="draws stopped at max_horizon"))
        if support_check:
            slack = 1e-9 * d.upper
            bad = int(np.sum((kept <= d.lower - slack) | (kept >= d.upper + slack)))
            out.append(CheckRecord(f"{prefix}/f{start}/support", "count", bad, 0,
                                   analytic=[d.lower, d.upper],
                                   estimate=[float(kept.min()), float(kept.max())]))
        ks = ks_statistic(kept, lambda s, d=d: expfun_cdf(d, s))
        out.append(CheckRecord(f"{prefix}/f{start}/ks", "ks", ks, thr))
    return out, m, dens


def suite_fig2(ctx: VerifyContext) -> list[CheckRecord]:
    """Compact-support exponential functional (both trends positive)."""
    out, m, dens = _expfun_density_checks(ctx, "fig2", FIG2_PARAMS, 600, support_check=True)
    v = finiteness_certificate(m)
    out.insert(0, _verdict_record("fig2/finiteness", Status.FINITE.value, v.status.value))
    for start, d in enumerate(dens):
        out.append(_rel_record(f"fig2/f{start}/mean_vs_quadrature", density_first_moment(d),
                               expfun_mean(m, start), 1e-8))
    return out


def suite_fig3(ctx: VerifyContext) -> list[CheckRecord]:
    """Opposite-trend exponential functional with Beta-prime law."""
    lam0, lam1, c0, c1, _, _ = FIG3_PARAMS
    m = telegraph_jump_model(*FIG3_PARAMS)
    v = finiteness_certificate(m)
    out = [
        _verdict_record("fig3/finiteness", Status.FINITE.value, v.status.value),
        CheckRecord("fig3/alpha_plus_beta", "sign", lam0 / c0 + lam1 / c1, 0.0,
                    note="alpha + beta must be negative"),
    ]
    if v.finite:
        out.append(_verdict_record("fig3/certificate_recheck", True, recheck_certificate(m, v.certificate)))
    checks, _, dens = _expfun_density_checks(ctx, "fig3", FIG3_PARAMS, 700, support_check=False)
    out += checks
    for start, d in enumerate(dens):
        out.append(_rel_record(f"fig3/f{start}/mean_vs_quadrature", density_first_moment(d),
                               expfun_mean(m, start), 1e-6))
    return out


def suite_infinite(ctx: VerifyContext) -> list[CheckRecord]:
    """alpha + beta = 0: the functional is a.s. infinite."""
    m = telegraph_jump_model(*INFINITE_PARAMS)
    out = [
        _verdict_record("infinite/closed_form_verdict", Status.INFINITE_AS.value,
                        getattr(telegraph_expfun_density(*INFINITE_PARAMS), "value", "densities")),
        _verdict_record("infinite/certificate_verdict", Status.INFINITE_AS.value,
                        finiteness_certificate(m).status.value),
        CheckRecord("infinite/density_comparison", "skipped", 0.0, 0.0, skipped=True,
                    note="no density exists for an a.s. infinite functional"),
    ]
    n = ctx.n(10_000)
    medians = []
    for T in (10.0, 100.0, 1000.0):
        v, _ = _expfun_draws(ctx, m, 0, n, tag=800, max_horizon=T)
        medians.append(float(np.median(v)))
    drops = sum(b <= a for a, b in zip(medians, medians[1:]))
    out.append(CheckRecord("infinite/median_growth", "count", drops, 0, estimate=medians,
                           note="medians at horizons 10, 100, 1000"))
    return out


STABLE_CASES = (
    # name, (a0, a1, alpha0, alpha1, beta, b, variant, lambda0, lambda1), expected tag
    ("1a", (1.0, 1.0, 0.6, 0.4, 0.8, -1.0, "Plus", 1.0, 1.0), "1a"),
    ("1b", (1.0, 1.0, 0.5, 0.5, 0.5, -2.0, "Plus", 1.0, 1.0), "1b"),
    ("1c", (1.0, 1.0, 0.6, 0.4, 0.2, 0.5, "Plus", 1.0, 1.0), "1c"),
    ("2a", (1.0, 1.0, 0.6, 0.4, 0.8, -1.0, "Minus0", 1.0, 1.0), "2a"),
    ("2b", (1.0, 1.0, 0.6, 0.4, 0.4, -0.5, "Minus0", 1.0, 1.0), "2b"),
    ("2c", (1.0, 1.0, 0.6, 0.4, 0.2, 0.0, "Minus0", 1.0, 1.0), "2c"),
    ("3a", (1.0, 1.0, 0.6, 0.4, 0.4, 2.0, "Minus1", 1.0, 1.0), "3a"),
    ("3b", (1.0, 1.0, 0.6, 0.4, 0.2, 1.0, "Minus1", 1.0, 1.0), "3b"),
    ("Minus1 beta>alpha1", (1.0, 1.0, 0.6, 0.4, 0.8, 5.0, "Minus1", 1.0, 1.0), None),
    ("Plus beta<alpha1 b<0", (1.0, 1.0, 0.6, 0.4, 0.2, -0.1, "Plus", 1.0, 1.0), None),
)


def stable_witness_model(rate: float = 2.0) -> RegimeModel:
    """Plus case 1a realized by a model: stable blocks with alpha1 = 0.4 and
    negative Exp(rate) switch jumps, so E exp(-xi (Y0 + Y1)) = 1 + (2/rate) xi + ..."""
    return RegimeModel(1.0, 1.0, StableSubordinator(1.0, 0.6), StableSubordinator(1.0, 0.4),
                       Jump(Exponential(rate, -1), Exponential(rate, -1)))


def suite_stable(ctx: VerifyContext) -> list[CheckRecord]:
    out = []
    for name, args, tag in STABLE_CASES:
        v = stable_finiteness(*args)
        expected = (Status.FINITE.value, tag) if tag else (Status.UNKNOWN.value, None)
        out.append(_verdict_record(f"stable/case {name}", list(expected), [v.status.value, v.case_tag]))
    m = stable_witness_model()
    table = stable_finiteness(1.0, 1.0, 0.6, 0.4, 1.0, -1.0, StableVariant.PLUS)
    cert = finiteness_certificate(m)
    out.append(_verdict_record("stable/witness/table_verdict", "1a", table.case_tag))
    out.append(_verdict_record("stable/witness/certificate", Status.FINITE.value, cert.status.value))
    if cert.finite:
        g = cert.certificate
        l0, l1 = g**0.6, g**0.4
        h = (2.0 / (2.0 - g)) ** 2
        det = l0 * l1 + l1 + l0 + (1.0 - h)
        out.append(CheckRecord("stable/witness/det_positive", "sign", -det, 0.0, estimate=g,
                               note="det of the exponent matrix at the witness, written out by hand"))
    return out


SUITES = {
    "fig1": suite_fig1,
    "jump": suite_jump,
    "reduction": suite_reduction,
    "residuals": suite_residuals,
    "fig2": suite_fig2,
    "fig3": suite_fig3,
    "infinite": suite_infinite,
    "stable": suite_stable,
}


def run_verify(suite: str = "all", seed: int = 42, workers: int = 1,
               paths: int | None = None) -> McReport:
    ctx = VerifyContext(seed=seed, workers=workers, paths=paths)
    names = list(SUITES) if suite == "all" else [suite]
    report = McReport(suite=suite, seed=seed)
    for name in names:
        report.checks.extend(SUITES[name](ctx))
    return report
