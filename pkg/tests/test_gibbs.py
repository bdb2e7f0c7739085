import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bowendim.errors import ModelError
from bowendim.gibbs import (MarkovMeasure, cylinder_mass, entropy, equilibrium_measure,
                            gibbs_certificate, integrate, lyapunov_exponents, markov_measure,
                            pesin_check, perturbed_measure, srb_measure, u_gibbs_certificate,
                            variational_gap)
from bowendim.potentials import LocallyConstantPotential
from bowendim.pressure import pressure_exact
from bowendim.symbolic import SubshiftOfFiniteType, topological_entropy, word_array

from conftest import DEMOS, GOLDEN, demo, irreducible_matrices, markov_matrix


def random_potential(S, depth, seed):
    k = word_array(S, depth).shape[0]
    return LocallyConstantPotential(S, depth, np.random.default_rng(seed).normal(0, 1, k))


def test_markov_measure_validation():
    S = SubshiftOfFiniteType(GOLDEN)
    with pytest.raises(ModelError):
        markov_measure(S, np.array([[0.5, 0.4], [1.0, 0.0]]))
    with pytest.raises(ModelError):
        markov_measure(S, np.array([[0.5, 0.5], [0.5, 0.5]]))
    with pytest.raises(ModelError):
        markov_measure(S, np.array([[0.5, 0.5], [1.0, 0.0]]), p=np.array([0.5, 0.5]))


def test_parry_measure_has_maximal_entropy():
    S = SubshiftOfFiniteType(GOLDEN)
    mu = equilibrium_measure(S, LocallyConstantPotential.zero(S))
    assert entropy(mu) == pytest.approx(topological_entropy(S), abs=1e-12)
    phi = (1 + np.sqrt(5)) / 2
    # Parry measure of the golden-mean shift: p(0) = phi^2 / (1 + phi^2)
    assert mu.p[0] == pytest.approx(phi ** 2 / (1 + phi ** 2), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(irreducible_matrices(), st.integers(1, 2), st.integers(0, 2 ** 16))
def test_equilibrium_attains_variational_principle(A, depth, seed):
    S = SubshiftOfFiniteType(A)
    pot = random_potential(S, depth, seed)
    mu = equilibrium_measure(S, pot)
    assert abs(variational_gap(mu, pot)) <= 1e-9
    rng = np.random.default_rng(seed)
    others = [perturbed_measure(mu, rng) for _ in range(3)]
    assert all(variational_gap(nu, pot) > 0 for nu in others if not np.allclose(nu.Q, mu.Q))


@settings(max_examples=40, deadline=None)
@given(irreducible_matrices(), st.integers(0, 2 ** 16), st.integers(1, 4))
def test_cylinder_masses_are_consistent(A, seed, n):
    S = SubshiftOfFiniteType(A)
    mu = markov_measure(S, markov_matrix(np.random.default_rng(seed), A))
    words = word_array(S, n)
    masses = np.exp(mu.log_masses(words))
    assert masses.sum() == pytest.approx(1.0, abs=1e-12)
    longer = word_array(S, n + 1)
    ext = np.exp(mu.log_masses(longer))
    # dropping the last symbol sums extensions back to the parent cylinder
    parents = {tuple(w): 0.0 for w in words}
    for w, m in zip(longer, ext):
        parents[tuple(w[:-1])] += m
    assert np.allclose([parents[tuple(w)] for w in words], masses, atol=1e-12)


def test_inadmissible_cylinder_has_zero_mass():
    S = SubshiftOfFiniteType(GOLDEN)
    mu = equilibrium_measure(S, LocallyConstantPotential.zero(S))
    assert cylinder_mass(mu, (1, 1)) == 0.0


def test_order_two_equilibrium():
    S = SubshiftOfFiniteType(GOLDEN)
    pot = random_potential(S, 3, 7)
    mu = equilibrium_measure(S, pot)
    assert mu.order == 2
    assert entropy(mu) + integrate(mu, pot) == pytest.approx(pressure_exact(S, pot), abs=1e-9)


@pytest.mark.parametrize("name", DEMOS)
def test_gibbs_certificates_on_demos(name):
    model = demo(name).model
    S = model.subshift
    mu = srb_measure(model)
    pot = mu.potential
    g = gibbs_certificate(mu, pot, mu.pressure)
    assert np.isfinite(g.ratio) and g.stable
    ug = u_gibbs_certificate(model, mu, pot)
    assert np.isfinite(ug.ratio) and ug.stable
    rng = np.random.default_rng(1)
    margins = [variational_gap(perturbed_measure(mu, rng), pot, mu.pressure) for _ in range(5)]
    assert min(margins) > 0
    assert abs(variational_gap(mu, pot, mu.pressure)) <= 1e-9
    assert S is mu.subshift


def test_wrong_pressure_makes_gibbs_ratio_drift():
    S = SubshiftOfFiniteType(GOLDEN)
    pot = random_potential(S, 1, 2)
    mu = equilibrium_measure(S, pot)
    assert not gibbs_certificate(mu, pot, mu.pressure + 0.05).stable


def test_gibbs_certificate_for_non_equilibrium_measure_drifts():
    S = SubshiftOfFiniteType.full(2)
    pot = LocallyConstantPotential(S, 1, np.array([0.0, 1.0]))
    nu = markov_measure(S, np.array([[0.5, 0.5], [0.5, 0.5]]))
    assert not gibbs_certificate(nu, pot, pressure_exact(S, pot)).stable


def test_diagonal_exponents_are_marginal_averages():
    model = demo("srb-mixed").model
    mu = srb_measure(model)
    lyap = lyapunov_exponents(mu, model)
    q = mu.symbol_marginal
    assert np.allclose(lyap.bands, q @ np.log(model.unstable_rates))
    assert lyap.stable == pytest.approx(q @ np.log(model.stable_rates))


def test_cocycle_exponent_upper_sequence():
    model = demo("rotation-cocycle").model
    mu = srb_measure(model)
    lyap = lyapunov_exponents(mu, model, n_max=16)
    assert lyap.upper_monotone
    assert lyap.sampled[0] <= lyap.upper_trace[-1][0] + 0.01
    assert lyap.sampled[0] > np.log(1.5)


@pytest.mark.parametrize("name", ["diagonal-l2", "srb-mixed", "full-2-shift"])
def test_entropy_formula_on_saturated_models(name):
    assert pesin_check(demo(name).model) <= 1e-9


def test_entropy_formula_fails_on_cantor_horseshoe():
    # the Jacobian equilibrium of the middle-thirds model is uniform: h = log 2 < log 3
    assert pesin_check(demo("ternary").model) == pytest.approx(np.log(3) - np.log(2), abs=1e-12)


def test_perturbed_measure_keeps_support():
    S = SubshiftOfFiniteType(GOLDEN)
    mu = equilibrium_measure(S, LocallyConstantPotential.zero(S))
    nu = perturbed_measure(mu, np.random.default_rng(0))
    assert isinstance(nu, MarkovMeasure)
    assert np.array_equal(nu.Q > 0, mu.Q > 0)
