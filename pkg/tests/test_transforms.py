import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.linalg import expm

from kaclevy.errors import InvalidParams, UnsupportedDomain, WrongVariant
from kaclevy.levy_models import (
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
    law_fourier,
    law_laplace,
)
from kaclevy.regime import Jump, RegimeModel, Renewal, exponent_matrix
from kaclevy.rng import run_batches
from kaclevy.simulate import (
    simulate_bigjump_batch,
    simulate_jump_batch,
    simulate_renewal_batch,
    simulate_subordinated_batch,
)
from kaclevy.transforms import (
    SINGULAR_EPS,
    bigjump_matrix,
    bigjump_mgf,
    bigjump_rates,
    bigjump_tail_laplace,
    jump_mgf,
    jump_mgf_hyperbolic,
    limit_char,
    renewal_char,
    subordinated_mgf,
    telegraph_mgf_classical,
)

from strategies import jump_models, renewal_models, xi_in_domain

FIG1 = RegimeModel(2.0, 1.0, Drift(1.0), Drift(-1.0), Renewal(Dirac(0.0), Dirac(0.0)))


# ---------------------------------------------------------------- renewal regime

@given(renewal_models, st.floats(0, 5))
def test_renewal_char_is_one_at_zero(model, t):
    assert np.allclose(list(renewal_char(model, t, 0.0)), 1.0, atol=1e-12)


@given(renewal_models, st.floats(-4, 4))
def test_renewal_char_at_time_zero_is_restart_law(model, theta):
    phi = renewal_char(model, 0.0, theta)
    g = model.variant
    assert phi.phi0 == pytest.approx(law_fourier(g.g0, theta), abs=1e-12)
    assert phi.phi1 == pytest.approx(law_fourier(g.g1, theta), abs=1e-12)


def _renewal_rhs_integral(model, t, theta, i):
    """Right-hand side of the first-switch decomposition, by quadrature."""
    lam = model.lambdas[i]
    g = model.laws()[i]
    k = lam + khintchine_exponent(model.blocks[i], theta)
    other = lambda u: renewal_char(model, u, theta)[1 - i]  # noqa: E731
    f = lambda u, part: part(lam * np.exp(-lam * (t - u)) * other(u))  # noqa: E731
    re = quad(f, 0, t, args=(np.real,), epsabs=1e-13, epsrel=1e-12)[0]
    im = quad(f, 0, t, args=(np.imag,), epsabs=1e-13, epsrel=1e-12)[0]
    return np.exp(-k * t) * law_fourier(g, theta) + re + 1j * im


@given(renewal_models, st.floats(0.05, 3), st.floats(-3, 3))
def test_renewal_integral_equation(model, t, theta):
    for i in (0, 1):
        lhs = renewal_char(model, t, theta)[i]
        assert abs(lhs - _renewal_rhs_integral(model, t, theta, i)) < 1e-8


@given(renewal_models, st.floats(0.05, 3), st.floats(-3, 3))
def test_renewal_ode(model, t, theta):
    h = 1e-5
    phi = lambda s: np.array(list(renewal_char(model, s, theta)))  # noqa: E731
    deriv = (phi(t + h) - phi(t - h)) / (2 * h)
    now = phi(t)
    for i in (0, 1):
        lam = model.lambdas[i]
        psi = khintchine_exponent(model.blocks[i], theta)
        g = law_fourier(model.laws()[i], theta)
        rhs = lam * (now[1 - i] - now[i]) - psi * np.exp(-(lam + psi) * t) * g
        assert abs(deriv[i] - rhs) < 1e-6 * (1 + abs(psi))


def test_singular_point_is_continuous():
    """psi0 = lambda1 is a removable singularity; nearby values must agree."""
    model = RegimeModel(1.0, 0.5, BrownianDrift(0.0, 1.0), Drift(0.3), Renewal(Dirac(0), Dirac(0)))
    theta_star = 1.0  # sigma^2 theta^2 / 2 = 0.5 = lambda1
    at = renewal_char(model, 2.0, theta_star)
    for d in (1e-9, 1e-7, 1e-5, 1e-3):
        near = renewal_char(model, 2.0, theta_star + d)
        assert abs(near.phi0 - at.phi0) < 5 * d + 1e-12
    assert SINGULAR_EPS > 0


def test_vectorized_theta_matches_scalar():
    th = np.linspace(-3, 3, 7)
    vec = renewal_char(FIG1, 1.3, th)
    for k, x in enumerate(th):
        assert vec.phi0[k] == pytest.approx(renewal_char(FIG1, 1.3, x).phi0)


@pytest.mark.parametrize("model", [
    FIG1,
    RegimeModel(1.0, 3.0, BrownianDrift(0.5, 1.0), CompoundPoissonExp(-0.3, 2.0, 1.5),
                Renewal(Gaussian(0.2, 0.5), TwoPoint(-1.0, 1.0, 0.4))),
])
def test_geometric_convergence_to_limit(model):
    th = np.linspace(-4, 4, 17)
    lim = limit_char(model, th)
    errs = []
    for t in (5.0, 10.0, 20.0):
        phi = renewal_char(model, t, th)
        errs.append(max(np.abs(phi.phi0 - lim).max(), np.abs(phi.phi1 - lim).max()))
    assert errs[2] < 1e-6
    assert errs[1] < errs[0] and errs[2] < errs[1]


def test_limit_char_of_symmetric_telegraph():
    # p0 f0 + p1 f1 with f_i the one-sided exponentials
    th = np.linspace(-3, 3, 13)
    expected = (2 / 3) * 1 / (2 - 1j * th) + (1 / 3) * 2 / (1 + 1j * th)
    assert np.allclose(limit_char(FIG1, th), expected)


def test_renewal_char_against_simulation():
    model = RegimeModel(1.5, 0.7, CompoundPoissonBilateral(0.2, 1.0, 0.5, 2.0, 3.0, 0.3),
                        BrownianDrift(-0.4, 0.6), Renewal(Exponential(2.0), Gaussian(0.0, 0.3)))
    t, n = 1.7, 100_000
    for start in (0, 1):
        x = run_batches(lambda rng, k: simulate_renewal_batch(model, t, start, k, rng), n, 3, tag=start)
        for th in (-1.0, 0.5, 2.0):
            v = np.exp(1j * th * x)
            se = np.sqrt(v.real.var() + v.imag.var()) / np.sqrt(n)
            assert abs(v.mean() - renewal_char(model, t, th)[start]) < 4 * se


def test_renewal_rejects_bad_inputs():
    with pytest.raises(InvalidParams):
        renewal_char(FIG1, -1.0, 0.3)
    stable = RegimeModel(1, 1, StableSubordinator(1.0, 0.5), Drift(0), Renewal(Dirac(0), Dirac(0)))
    with pytest.raises(UnsupportedDomain):
        renewal_char(stable, 1.0, 0.3)
    with pytest.raises(WrongVariant):
        jump_mgf(FIG1, 1.0, 0.3)


# ---------------------------------------------------------------- jump regime

@given(jump_models, st.floats(0, 4), xi_in_domain)
def test_jump_mgf_matches_matrix_exponential(model, t, xi):
    M = exponent_matrix(model, xi).as_array()
    oracle = expm(-t * M) @ np.ones(2)
    got = np.array(list(jump_mgf(model, t, xi)))
    assert np.allclose(got, oracle, rtol=1e-9, atol=1e-12)


@given(jump_models, st.floats(0, 4), xi_in_domain)
def test_eigen_and_hyperbolic_forms_agree(model, t, xi):
    a = np.array(list(jump_mgf(model, t, xi)))
    b = np.array(list(jump_mgf_hyperbolic(model, t, xi)))
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


@given(jump_models, st.floats(0, 4))
def test_jump_mgf_at_zero_argument(model, t):
    assert np.allclose(list(jump_mgf(model, t, 0.0)), 1.0, atol=1e-12)


@given(jump_models, xi_in_domain)
def test_jump_mgf_at_time_zero(model, xi):
    assert np.allclose(list(jump_mgf(model, 0.0, xi)), 1.0)


@given(jump_models, st.floats(0.05, 3), xi_in_domain)
def test_jump_integral_equation(model, t, xi):
    for i in (0, 1):
        lam = model.lambdas[i]
        k = lam + laplace_exponent(model.blocks[i], xi)
        h = law_laplace(model.laws()[i], xi)
        tail = quad(lambda s: lam * np.exp(-k * s) * h * jump_mgf(model, t - s, xi)[1 - i], 0, t,
                    epsabs=1e-13, epsrel=1e-12)[0]
        rhs = np.exp(-k * t) + tail
        lhs = jump_mgf(model, t, xi)[i]
        assert lhs == pytest.approx(rhs, rel=1e-7, abs=1e-10)


@given(st.floats(0.2, 3), st.floats(0.2, 3), st.floats(-2, 2), st.floats(-2, 2),
       st.floats(0, 3), st.floats(-1.5, 1.5))
def test_classical_telegraph_reduction(l0, l1, c0, c1, t, xi):
    model = RegimeModel(l0, l1, Drift(c0), Drift(c1), Jump(Dirac(0.0), Dirac(0.0)))
    a = np.array(list(jump_mgf(model, t, xi)))
    b = np.array(list(telegraph_mgf_classical(l0, l1, c0, c1, t, xi)))
    assert np.allclose(a, b, rtol=1e-12, atol=1e-14)


def test_jump_mgf_against_simulation():
    model = RegimeModel(1.2, 0.8, CompoundPoissonExp(0.5, 1.0, 2.0), BrownianDrift(-0.2, 0.7),
                        Jump(Exponential(3.0, -1), TwoPoint(0.0, 1.0, 0.5)))
    t, n = 1.5, 100_000
    for start in (0, 1):
        x = run_batches(lambda rng, k: simulate_jump_batch(model, t, start, k, rng), n, 5, tag=start)
        for xi in (0.2, 0.8):
            v = np.exp(-xi * x)
            assert abs(v.mean() - jump_mgf(model, t, xi)[start]) < 4 * v.std() / np.sqrt(n)


# ---------------------------------------------------------------- big-jump switching

B0 = CompoundPoissonBilateral(0.3, 2.0, 0.4, 1.5, 1.2, 0.5)
B1 = CompoundPoissonBilateral(-0.2, 1.5, 0.6, 1.0, 2.0, 0.3)


def _down0(y):
    """Levy density of state-0 downward jumps of size y > 0."""
    return B0.nu * (1 - B0.p) * B0.a_minus * np.exp(-B0.a_minus * y)


def _up1(y):
    return B1.nu * B1.p * B1.a_plus * np.exp(-B1.a_plus * y)


def _tail_oracle(xi, R0=0.5, R1=0.7):
    a0 = quad(lambda y: np.exp(xi * y) * _down0(y), R0, 200)[0]
    a1 = quad(lambda y: np.exp(-xi * y) * _up1(y), R1, 200)[0]
    return a0, a1, quad(_down0, R0, 200)[0], quad(_up1, R1, 200)[0]


@pytest.mark.parametrize("xi", [-0.5, 0.0, 0.4, 0.9])
def test_bigjump_tail_quantities(xi):
    a0, a1, lam0, lam1 = _tail_oracle(xi)
    assert np.allclose(bigjump_tail_laplace(B0, B1, 0.5, 0.7, xi), (a0, a1), rtol=1e-10)
    assert np.allclose(bigjump_rates(B0, B1, 0.5, 0.7), (lam0, lam1), rtol=1e-10)


@pytest.mark.parametrize("xi", [-0.5, 0.4, 0.9])
def test_bigjump_diagonal_is_rate_plus_truncated_exponent(xi):
    """lambda_i + exponent of the block with the switching tail removed."""
    a0, a1, lam0, lam1 = _tail_oracle(xi)
    trunc0 = laplace_exponent(B0, xi) - quad(lambda y: (1 - np.exp(xi * y)) * _down0(y), 0.5, 200)[0]
    trunc1 = laplace_exponent(B1, xi) - quad(lambda y: (1 - np.exp(-xi * y)) * _up1(y), 0.7, 200)[0]
    M = bigjump_matrix(B0, B1, 0.5, 0.7, xi)
    assert M.l00 == pytest.approx(lam0 + trunc0, rel=1e-10)
    assert M.l11 == pytest.approx(lam1 + trunc1, rel=1e-10)
    assert M.l01 == pytest.approx(-a0) and M.l10 == pytest.approx(-a1)
    M2 = bigjump_matrix(B0, B1, 0.5, 0.7, xi, include_trigger=False)
    assert M2.l01 == pytest.approx(-lam0) and M2.l10 == pytest.approx(-lam1)


def test_bigjump_mgf_at_zero_and_large_threshold():
    assert np.allclose(list(bigjump_mgf(B0, B1, 0.5, 0.7, 2.0, 0.0)), 1.0)
    # no switching in practice: each state evolves alone
    far = bigjump_mgf(B0, B1, 60.0, 60.0, 1.5, 0.4)
    assert far.phi0 == pytest.approx(np.exp(-1.5 * laplace_exponent(B0, 0.4)), rel=1e-9)
    assert far.phi1 == pytest.approx(np.exp(-1.5 * laplace_exponent(B1, 0.4)), rel=1e-9)


@pytest.mark.parametrize("include_trigger", [True, False])
def test_bigjump_mgf_against_simulation(include_trigger):
    t, n = 1.2, 100_000
    for start in (0, 1):
        x = run_batches(lambda rng, k: simulate_bigjump_batch(B0, B1, 0.5, 0.7, t, start, k, rng,
                                                              include_trigger), n, 11, tag=start)
        for xi in (-0.3, 0.5):
            v = np.exp(-xi * x)
            exact = bigjump_mgf(B0, B1, 0.5, 0.7, t, xi, include_trigger)[start]
            assert abs(v.mean() - exact) < 4 * v.std() / np.sqrt(n)


def test_bigjump_validation():
    with pytest.raises(InvalidParams):
        bigjump_rates(Drift(0), B1, 1.0, 1.0)
    with pytest.raises(InvalidParams):
        bigjump_rates(B0, B1, 0.0, 1.0)
    with pytest.raises(UnsupportedDomain):
        bigjump_tail_laplace(B0, B1, 0.5, 0.7, 1.5)


# ---------------------------------------------------------------- subordination

XM = RegimeModel(1.0, 2.0, BrownianDrift(0.3, 0.5), Drift(-0.5), Jump(Dirac(0.2), Exponential(2.0)))
ZM = RegimeModel(0.7, 1.3, CompoundPoissonExp(0.5, 1.0, 2.0), Drift(1.5), Jump(Dirac(0.0), Exponential(3.0)))


def test_identity_time_change():
    Z = RegimeModel(1.0, 1.0, Drift(1.0), Drift(1.0), Jump(Dirac(0.0), Dirac(0.0)))
    L = subordinated_mgf(XM, Z, 1.4, 0.6)
    direct = list(jump_mgf(XM, 1.4, 0.6))
    assert np.allclose(L[:, 0], direct) and np.allclose(L[:, 1], direct)


def test_subordinated_at_zero():
    assert np.allclose(subordinated_mgf(XM, ZM, 1.0, 0.0), 1.0)


def test_subordinated_against_simulation():
    t, n, xi = 1.0, 100_000, 0.5
    L = subordinated_mgf(XM, ZM, t, xi)
    for i in (0, 1):
        for j in (0, 1):
            x = run_batches(lambda rng, k: simulate_subordinated_batch(XM, ZM, t, (i, j), k, rng),
                            n, 13, tag=2 * i + j)
            v = np.exp(-xi * x)
            assert abs(v.mean() - L[i, j]) < 4 * v.std() / np.sqrt(n)


def test_subordinator_required():
    with pytest.raises(InvalidParams):
        subordinated_mgf(XM, XM, 1.0, 0.3)
