import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from kaclevy.errors import InvalidCase, WrongVariant
from kaclevy.levy_models import (
    BrownianDrift,
    CompoundPoissonBilateral,
    CompoundPoissonExp,
    Dirac,
    Drift,
    Exponential,
    Gaussian,
    TwoPoint,
    khintchine_exponent,
)
from kaclevy.limits import (
    ClosedDensity,
    GridDensity,
    block_kernel,
    brownian_coefficients,
    brownian_kernel,
    cpexp_coefficients,
    cpexp_kernel,
    limit_density,
    limit_density_brownian,
    limit_density_cpexp,
    limit_density_telegraph,
    limit_mixture,
    sample_limit_batch,
    telegraph_kernel,
)
from kaclevy.regime import Jump, RegimeModel, Renewal
from kaclevy.rng import run_batches
from kaclevy.transforms import limit_char

FIG1 = RegimeModel(2.0, 1.0, Drift(1.0), Drift(-1.0), Renewal(Dirac(0.0), Dirac(0.0)))

closed_blocks = st.one_of(
    st.builds(Drift, st.floats(-3, 3)),
    st.builds(BrownianDrift, st.floats(-3, 3), st.floats(0.1, 3)),
    st.builds(CompoundPoissonExp, st.floats(-3, 3), st.floats(0, 4), st.floats(0.3, 5),
              st.sampled_from([-1, 1])),
)
closed_laws = st.one_of(
    st.builds(Dirac, st.floats(-2, 2)),
    st.builds(Gaussian, st.floats(-2, 2), st.floats(0, 1.5)),
    st.builds(TwoPoint, st.floats(-2, 2), st.floats(-2, 2), st.floats(0, 1)),
)
closed_models = st.builds(RegimeModel, st.floats(0.2, 4), st.floats(0.2, 4), closed_blocks,
                          closed_blocks, st.builds(Renewal, closed_laws, closed_laws))


def _numeric_char(dens, theta, lo=-80, hi=80):
    """Fourier transform of the density by quadrature plus the atoms."""
    atoms = sum(a.mass * np.exp(1j * theta * a.loc) for a in dens.atoms if a.sd == 0)
    breaks = sorted({p.shift for p in dens.pieces} | {a.loc for a in dens.atoms})
    re = quad(lambda x: np.cos(theta * x) * dens.pdf(x), lo, hi, points=breaks, limit=400)[0]
    im = quad(lambda x: np.sin(theta * x) * dens.pdf(x), lo, hi, points=breaks, limit=400)[0]
    return atoms + re + 1j * im


def test_mixture_weights():
    mix = limit_mixture(FIG1)
    assert mix.p0 == pytest.approx(1 / 3) and mix.p1 == pytest.approx(2 / 3)
    with pytest.raises(WrongVariant):
        limit_mixture(RegimeModel(1, 1, Drift(0), Drift(0), Jump(Dirac(0), Dirac(0))))


def test_fig1_density_values():
    d = limit_density(FIG1)
    x = np.array([-2.0, -0.5, 0.5, 2.0])
    expected = (2 / 3) * np.where(x > 0, np.exp(-2 * x), np.exp(x))
    assert np.allclose(d.pdf(x), expected, rtol=1e-14)
    assert d.total_mass == pytest.approx(1.0, abs=1e-14)
    assert d.cdf(0.0) == pytest.approx(2 / 3)


def test_equal_drifts_give_standard_exponential():
    d = limit_density_telegraph(1.0, 1.0, 1.0, 1.0)
    x = np.linspace(0.1, 5, 9)
    assert np.allclose(d.pdf(x), np.exp(-x))


def test_asymmetric_laplace_example():
    # lambda0 = 1, lambda1 = 3, c0 = 2, c1 = -1: w = 3/4
    d = limit_density_telegraph(1.0, 3.0, 2.0, -1.0)
    assert d.pdf(1.0) == pytest.approx(0.75 * 0.5 * np.exp(-0.5))
    assert d.pdf(-1.0) == pytest.approx(0.75 * np.exp(-3.0))
    assert d.total_mass == pytest.approx(1.0)


def test_zero_drift_state_is_an_atom():
    d = limit_density_telegraph(1.0, 2.0, 0.0, 1.0)
    assert d.atoms[0].mass == pytest.approx((2 / 3) * 1.0)
    assert d.cdf(0.0) - d.cdf_left(0.0) == pytest.approx(2 / 3)
    assert d.total_mass == pytest.approx(1.0)


def test_symmetric_brownian_kernel():
    A, a1, a2 = brownian_coefficients(1.0, 0.0, np.sqrt(2.0))
    assert (A, a1, a2) == pytest.approx((0.5, -1.0, 1.0))
    k = brownian_kernel(1.0, 0.0, np.sqrt(2.0))
    x = np.array([-1.5, 0.3, 2.0])
    assert np.allclose(k.pdf(x), 0.5 * np.exp(-np.abs(x)))
    with pytest.raises(InvalidCase):
        brownian_kernel(1.0, 0.0, 0.0)


@given(st.floats(0.1, 5), st.floats(-4, 4), st.floats(0.1, 5), st.floats(0.1, 8))
def test_cpexp_root_and_weight_signs(lam, c, nu, a):
    co = cpexp_coefficients(lam, c, nu, a)
    if "alpha3" in co:
        assert co["alpha3"] > 0 and co["A3"] > 0
    elif c > 0:
        assert co["alpha1"] > 0 and co["alpha2"] > 0
        assert co["A1"] > 0 and co["A2"] > 0
    else:
        assert co["alpha2"] < 0 < co["alpha1"] < a
        assert co["A1"] > 0 > co["A2"]


@given(st.floats(0.1, 5), st.floats(-4, 4), st.floats(0.1, 5), st.floats(0.1, 8), st.floats(-6, 6))
def test_cpexp_partial_fractions(lam, c, nu, a, theta):
    """The kernel's transform is 1 / (lambda + psi) for both orientations."""
    for orientation in (1, -1):
        block = CompoundPoissonExp(c, nu, a, orientation)
        k = cpexp_kernel(lam, c, nu, a, orientation)
        target = 1.0 / (lam + khintchine_exponent(block, theta))
        assert abs(k.char(theta) - target) < 1e-9 * (1 + abs(target))


def test_cpexp_without_jumps_is_telegraph():
    for c in (-1.3, 0.0, 0.7):
        a = cpexp_kernel(2.0, c, 0.0, 1.0)
        b = telegraph_kernel(2.0, c)
        assert a == b


def test_cpexp_residue_identity():
    """A1 + A2 equals 1/c: the density jumps by 1/c at the origin."""
    for lam, c, nu, a in [(1.0, 0.5, 2.0, 1.5), (2.0, -0.8, 1.0, 3.0)]:
        k = cpexp_kernel(lam, c, nu, a)
        jump = k.pdf(1e-12) - k.pdf(-1e-12)
        assert jump == pytest.approx(1 / c, rel=1e-6)


@given(closed_models, st.floats(-5, 5))
def test_closed_density_char_matches_transform(model, theta):
    d = limit_density(model)
    assert isinstance(d, ClosedDensity)
    assert abs(d.char(theta) - limit_char(model, theta)) < 1e-10
    assert d.total_mass == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("model", [
    FIG1,
    RegimeModel(1.5, 0.5, BrownianDrift(0.3, 0.8), CompoundPoissonExp(-0.5, 1.0, 2.0),
                Renewal(Dirac(0.4), TwoPoint(-1.0, 1.0, 0.3))),
    RegimeModel(1.0, 2.0, CompoundPoissonExp(0.0, 1.0, 2.0, -1), Drift(0.5),
                Renewal(Gaussian(0.5, 0.4), Dirac(0.0))),
])
@pytest.mark.parametrize("theta", [-2.0, 0.7, 3.0])
def test_density_integrates_to_transform(model, theta):
    """Quadrature of the density, independent of the piece algebra."""
    d = limit_density(model)
    assert abs(_numeric_char(d, theta) - limit_char(model, theta)) < 1e-7


@pytest.mark.parametrize("model", [
    FIG1,
    RegimeModel(0.7, 1.8, BrownianDrift(-0.2, 1.1), CompoundPoissonExp(0.4, 2.0, 1.5),
                Renewal(Gaussian(0.0, 0.5), Dirac(-1.0))),
    RegimeModel(1.0, 2.0, Drift(0.0), Drift(1.0), Renewal(Dirac(0.0), Dirac(0.0))),
])
def test_ks_against_limit_sampler(model):
    d = limit_density(model)
    x = np.sort(run_batches(lambda rng, k: sample_limit_batch(model, k, rng), 40_000, 21))
    n = x.size
    F, Fl = d.cdf(x), d.cdf_left(x)
    ks = max(np.max(np.arange(1, n + 1) / n - F), np.max(Fl - np.arange(n) / n))
    # 99.9% Kolmogorov quantile: many KS tests run in this suite
    assert ks < 1.95 / np.sqrt(n)


def test_grid_fallback_for_exponential_restart():
    model = RegimeModel(1.0, 2.0, BrownianDrift(0.2, 0.7), Drift(-1.0),
                        Renewal(Exponential(1.5), Dirac(0.3)))
    d = limit_density(model)
    assert isinstance(d, GridDensity)
    assert d.total_mass == pytest.approx(1.0, abs=1e-3)
    for theta in (-1.0, 0.5, 2.0):
        grid_part = np.trapezoid(np.exp(1j * theta * d.x) * np.interp(d.x, d.x, d.density), d.x)
        assert abs(grid_part + d.exact.char(theta) - limit_char(model, theta)) < 2e-3
    x = np.sort(run_batches(lambda rng, k: sample_limit_batch(model, k, rng), 40_000, 22))
    n = x.size
    F = d.cdf(x)
    assert np.max(np.abs(np.arange(1, n + 1) / n - F)) < 1.95 / np.sqrt(n) + 1e-3


def test_unsupported_blocks():
    with pytest.raises(InvalidCase):
        block_kernel(CompoundPoissonBilateral(0.0, 1.0, 0.5, 1.0, 1.0), 1.0)
    d = limit_density_cpexp(1.0, 1.0, 1.0, -1.0, 1.0, 1.0, 2.0, 2.0)
    assert d.total_mass == pytest.approx(1.0)
    d = limit_density_brownian(1.0, 2.0, 0.5, -0.5, 1.0, 0.5)
    assert d.total_mass == pytest.approx(1.0)
