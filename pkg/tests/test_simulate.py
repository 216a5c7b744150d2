import math

import numpy as np
import pytest
from scipy.stats import chisquare, ks_2samp, poisson

from kaclevy.errors import InvalidParams, WrongVariant
from kaclevy.levy_models import (
    BrownianDrift,
    CompoundPoissonExp,
    Dirac,
    Drift,
    Gaussian,
    StableSubordinator,
)
from kaclevy.regime import Jump, RegimeModel, Renewal
from kaclevy.rng import run_batches
from kaclevy.simulate import (
    positive_stable,
    simulate_block,
    simulate_block_batch,
    simulate_expfun,
    simulate_expfun_batch,
    simulate_jump,
    simulate_jump_batch,
    simulate_path,
    simulate_renewal,
    simulate_renewal_batch,
    simulate_subordinated,
    simulate_subordinated_batch,
)

FIG2 = RegimeModel(2.0, 1.0, Drift(1.0), Drift(0.5), Jump(Dirac(-0.5), Dirac(0.5)))


def test_drift_block_is_exact(rng):
    assert simulate_block(Drift(2.0), 3.0, rng) == 6.0
    with pytest.raises(InvalidParams):
        simulate_block(Drift(1.0), -1.0, rng)


def test_brownian_variance():
    x = simulate_block_batch(BrownianDrift(0.0, 1.0), 1.0, 1_000_000, np.random.default_rng(1))
    assert abs(x.var() - 1.0) < 0.005


def test_stable_transform():
    rng = np.random.default_rng(2)
    v = np.exp(-simulate_block_batch(StableSubordinator(1.0, 0.5), 1.0, 1_000_000, rng))
    assert abs(v.mean() - math.exp(-1)) < 3 * v.std() / 1000
    s = positive_stable(0.7, 200_000, rng)
    w = np.exp(-2.0 * s)
    assert abs(w.mean() - math.exp(-(2.0**0.7))) < 4 * w.std() / math.sqrt(s.size)
    assert (s > 0).all()


def test_renewal_at_time_zero_is_restart_point(rng):
    m = RegimeModel(1.0, 1.0, BrownianDrift(0.0, 1.0), Drift(0.0), Renewal(Dirac(0.7), Dirac(-2.0)))
    assert simulate_renewal(m, 0.0, 0, rng) == 0.7
    assert simulate_renewal(m, 0.0, 1, rng) == -2.0
    with pytest.raises(WrongVariant):
        simulate_jump(m, 1.0, 0, rng)


def test_symmetric_chain_occupation():
    m = RegimeModel(1.3, 1.3, Drift(0.0), Drift(0.0), Renewal(Dirac(0.0), Dirac(0.0)))
    n = 100_000
    _, regime, _ = simulate_renewal_batch(m, 20.0, 0, n, np.random.default_rng(3), return_info=True)
    freq = (regime == 0).mean()
    assert abs(freq - 0.5) < 3 * math.sqrt(0.25 / n)


@pytest.mark.parametrize("variant", ["renewal", "jump"])
def test_switch_count_is_poisson(variant):
    lam, t, n = 1.5, 2.0, 100_000
    rng = np.random.default_rng(4)
    if variant == "renewal":
        m = RegimeModel(lam, lam, Drift(1.0), Drift(-1.0), Renewal(Dirac(0.0), Dirac(0.0)))
        _, _, k = simulate_renewal_batch(m, t, 0, n, rng, return_info=True)
    else:
        m = RegimeModel(lam, lam, Drift(1.0), Drift(-1.0), Jump(Dirac(0.0), Dirac(0.0)))
        _, _, k = simulate_jump_batch(m, t, 0, n, rng, return_info=True)
    top = 9
    observed = np.array([(k == j).sum() for j in range(top)] + [(k >= top).sum()])
    probs = np.append(poisson.pmf(np.arange(top), lam * t), poisson.sf(top - 1, lam * t))
    assert chisquare(observed, probs * n).pvalue > 0.001


def test_telegraph_envelope():
    t, n = 3.0, 50_000
    rng = np.random.default_rng(5)
    x0 = simulate_jump_batch(FIG2, t, 0, n, rng)
    x1 = simulate_jump_batch(FIG2, t, 1, n, rng)
    # the upper (resp. lower) bound is attained when no switch occurs
    assert np.all((-0.5 + 0.5 * t < x0) & (x0 <= 1.0 * t))
    assert np.all((0.5 * t <= x1) & (x1 < 0.5 + 1.0 * t))
    assert (x0 < 1.0 * t).mean() > 0.99
    plain = RegimeModel(1.0, 2.0, Drift(1.0), Drift(-2.0), Jump(Dirac(0.0), Dirac(0.0)))
    x = simulate_jump_batch(plain, t, 0, n, rng)
    assert np.all((x >= -2.0 * t) & (x <= 1.0 * t))


def test_path_record_structure():
    m = RegimeModel(2.0, 3.0, BrownianDrift(0.1, 0.4), Drift(-1.0), Jump(Dirac(0.3), Gaussian(0.0, 1.0)))
    rng = np.random.default_rng(6)
    for _ in range(50):
        p = simulate_path(m, 4.0, 1, rng)
        assert np.all(np.diff(p.switch_times) > 0)
        assert all(0 < s < 4.0 for s in p.switch_times)
        assert all(a != b for a, b in zip(p.regimes, p.regimes[1:]))
        assert p.regimes[0] == 1
        assert len(p.regimes) == len(p.switch_times) + 1 == len(p.segment_values)
        assert math.isfinite(p.terminal)


def test_path_and_batch_agree_in_law():
    m = RegimeModel(1.0, 2.0, BrownianDrift(0.2, 0.6), CompoundPoissonExp(-0.3, 1.0, 2.0),
                    Jump(Dirac(0.5), Gaussian(-0.2, 0.3)))
    rng = np.random.default_rng(7)
    a = np.array([simulate_path(m, 1.5, 0, rng).terminal for _ in range(20_000)])
    b = simulate_jump_batch(m, 1.5, 0, 20_000, rng)
    assert ks_2samp(a, b).pvalue > 0.001


def test_determinism_across_workers():
    m = RegimeModel(1.0, 2.0, BrownianDrift(0.2, 0.6), CompoundPoissonExp(-0.3, 1.0, 2.0),
                    Jump(Dirac(0.5), Gaussian(-0.2, 0.3)))
    fn = lambda rng, k: simulate_jump_batch(m, 2.0, 1, k, rng)  # noqa: E731
    a = run_batches(fn, 40_000, seed=8, workers=1)
    b = run_batches(fn, 40_000, seed=8, workers=4)
    assert np.array_equal(a, b)


def test_identity_subordination_matches_jump_process():
    x_model = RegimeModel(1.0, 2.0, BrownianDrift(0.3, 0.5), Drift(-0.5), Jump(Dirac(0.2), Dirac(-0.1)))
    z_model = RegimeModel(1.0, 1.0, Drift(1.0), Drift(1.0), Jump(Dirac(0.0), Dirac(0.0)))
    n = 100_000
    a = run_batches(lambda rng, k: simulate_subordinated_batch(x_model, z_model, 1.5, (0, 1), k, rng),
                    n, 9, tag=0)
    b = run_batches(lambda rng, k: simulate_jump_batch(x_model, 1.5, 0, k, rng), n, 9, tag=1)
    assert ks_2samp(a, b).statistic <= 0.01
    assert math.isfinite(simulate_subordinated(x_model, z_model, 1.0, (1, 0), np.random.default_rng(0)))
    with pytest.raises(InvalidParams):
        simulate_subordinated_batch(x_model, x_model, 1.0, (0, 0), 10, np.random.default_rng(0))


# ---------------------------------------------------------------- exponential functional

def test_expfun_single_drift():
    m = RegimeModel(1e-9, 1e-9, Drift(1.0), Drift(1.0), Jump(Dirac(0.0), Dirac(0.0)))
    v, truncated = simulate_expfun(m, 1e-12, 100.0, np.random.default_rng(10))
    # one segment reaches the horizon, so the draw is flagged as truncated
    assert v == pytest.approx(1.0, abs=1e-12)
    assert truncated


def test_expfun_fig2_support():
    v, trunc = simulate_expfun_batch(FIG2, 50_000, np.random.default_rng(11))
    assert not trunc.any()
    assert np.all((v > 1.0 - 1e-6) & (v < 2 * math.exp(0.5) + 1e-6))
    v1, _ = simulate_expfun_batch(FIG2, 50_000, np.random.default_rng(11), start_regime=1)
    assert np.all((v1 > math.exp(-0.5) - 1e-6) & (v1 < 2.0 + 1e-6))


@pytest.mark.parametrize("model", [
    RegimeModel(1.0, 1.0, Drift(1.0), Drift(-0.5), Jump(Dirac(-0.2), Dirac(0.2))),
    RegimeModel(1.0, 1.0, BrownianDrift(0.8, 0.5), CompoundPoissonExp(-0.3, 1.0, 2.0),
                Jump(Dirac(0.1), Dirac(-0.1))),
])
def test_expfun_monotone_in_horizon(model):
    n = 300 if isinstance(model.block0, BrownianDrift) else 20_000
    prev = None
    for T in (0.5, 2.0, 5.0, 20.0):
        v, _ = simulate_expfun_batch(model, n, np.random.default_rng(12), max_horizon=T)
        if prev is not None:
            assert np.all(v >= prev - 1e-12)
        prev = v


def test_expfun_validation(rng):
    with pytest.raises(InvalidParams):
        simulate_expfun_batch(FIG2, 10, rng, rel_tol=0.0)
    with pytest.raises(InvalidParams):
        simulate_expfun_batch(FIG2, 10, rng, max_horizon=0.0)
    m = RegimeModel(1.0, 1.0, Drift(0.0), Drift(0.0), Renewal(Dirac(0.0), Dirac(0.0)))
    with pytest.raises(WrongVariant):
        simulate_expfun_batch(m, 10, rng)
