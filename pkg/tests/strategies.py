"""Hypothesis strategies for blocks, laws and models."""
from hypothesis import strategies as st

from kaclevy.levy_models import (
    BrownianDrift,
    CompoundPoissonBilateral,
    CompoundPoissonExp,
    Dirac,
    Drift,
    Exponential,
    Gaussian,
    TwoPoint,
)
from kaclevy.regime import Jump, RegimeModel, Renewal

real = st.floats(-3, 3, allow_nan=False)
pos = st.floats(0.1, 4, allow_nan=False)
rate = st.floats(1.0, 5.0, allow_nan=False)
prob = st.floats(0, 1, allow_nan=False)
orient = st.sampled_from([-1, 1])

drift = st.builds(Drift, real)
brownian = st.builds(BrownianDrift, real, pos)
cp_exp = st.builds(CompoundPoissonExp, real, pos, rate, orient)
cp_bi = st.builds(CompoundPoissonBilateral, real, pos, prob, rate, rate, st.floats(0, 1.5))
blocks = st.one_of(drift, brownian, cp_exp, cp_bi)

laws = st.one_of(
    st.builds(Dirac, real),
    st.builds(Exponential, rate, orient),
    st.builds(Gaussian, real, st.floats(0, 1.5)),
    st.builds(TwoPoint, real, real, prob),
)

# every block and law above has a Laplace domain containing [-0.9, 0.9]
xi_in_domain = st.floats(-0.9, 0.9, allow_nan=False)

jump_models = st.builds(RegimeModel, pos, pos, blocks, blocks, st.builds(Jump, laws, laws))
renewal_models = st.builds(RegimeModel, pos, pos, blocks, blocks, st.builds(Renewal, laws, laws))
