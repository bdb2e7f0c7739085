import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bowendim.errors import ModelError
from bowendim.models import BandStructure
from bowendim.potentials import (LocallyConstantPotential, SingularValueFamily,
                                 as_locally_constant, conorm_weights, phi_values, psi,
                                 psi_hat, psi_hat_values, psi_values, unstable_weights)
from bowendim.symbolic import SubshiftOfFiniteType, word_array

from conftest import GOLDEN, demo, diagonal_models


def test_weights_fill_strongest_band_first():
    b = BandStructure((1, 1))
    assert np.allclose(unstable_weights(b, 1.5), [1.0, 0.5])
    assert np.allclose(conorm_weights(b, 1.5), [0.5, 1.0])
    assert np.allclose(unstable_weights(BandStructure((2, 1)), 2.5), [2.0, 0.5])
    assert np.allclose(unstable_weights(b, 2.0), [1.0, 1.0])


def test_parameter_range_enforced():
    model = demo("diagonal-l2").model
    with pytest.raises(ModelError):
        psi(model, [0], 2.5)
    with pytest.raises(ModelError):
        phi_values(model, np.array([[0]]), 1.2)


def test_psi_endpoints():
    model = demo("diagonal-l2").model
    w = np.array([0, 5, 9])
    assert psi(model, w, 0.0) == 0.0
    log_det = np.log(model.unstable_rates[w]).sum()
    assert psi(model, w, 2.0) == pytest.approx(log_det)
    assert psi_hat(model, w, 2.0) == pytest.approx(log_det)


def test_conorm_family_on_cocycle_uses_smallest_singular_value():
    model = demo("rotation-cocycle").model
    w = np.array([0, 1, 1, 0])
    P = np.eye(2)
    for a in w:
        P = model.band_matrices[0][a] @ P
    sv = np.linalg.svd(P, compute_uv=False)
    assert psi(model, w, 0.5) == pytest.approx(0.5 * np.log(sv[0]))
    assert psi_hat(model, w, 0.5) == pytest.approx(0.5 * np.log(sv[1]))


@settings(max_examples=40, deadline=None)
@given(diagonal_models(), st.integers(1, 4), st.floats(0, 1), st.floats(0, 1))
def test_psi_nondecreasing_concave_and_above_conorm_family(model, n, a, b):
    words = word_array(model.subshift, n)
    u = model.unstable_dim
    s1, s2 = sorted((a * u, b * u))
    v1, v2 = psi_values(model, words, s1), psi_values(model, words, s2)
    assert np.all(v2 >= v1 - 1e-12)
    mid = psi_values(model, words, 0.5 * (s1 + s2))
    assert np.all(mid >= 0.5 * (v1 + v2) - 1e-9)
    assert np.all(psi_hat_values(model, words, s1) <= v1 + 1e-9)


def test_locally_constant_table_validation():
    S = SubshiftOfFiniteType(GOLDEN)
    with pytest.raises(ModelError):
        LocallyConstantPotential(S, 2, np.zeros(4))
    with pytest.raises(ModelError):
        LocallyConstantPotential(S, 1, np.array([0.0, np.inf]))
    pot = LocallyConstantPotential(S, 2, np.array([1.0, 2.0, 3.0]))
    with pytest.raises(ModelError):
        pot.value([1, 1])


def test_birkhoff_sums_count_inner_windows():
    S = SubshiftOfFiniteType(GOLDEN)
    pot = LocallyConstantPotential.from_mapping(S, 2, {(0, 0): 1.0, (0, 1): 10.0, (1, 0): 100.0})
    # windows of 00101: 00, 01, 10, 01
    assert pot.birkhoff_sums(np.array([0, 0, 1, 0, 1]))[0] == 121.0
    assert pot.shifted(1.0).value([1, 0]) == 101.0
    assert pot.scaled(2.0).value([0, 1]) == 20.0


@settings(max_examples=30, deadline=None)
@given(diagonal_models(), st.integers(1, 3), st.integers(1, 3))
def test_depth_one_birkhoff_sums_add_over_concatenation(model, m, n):
    S = model.subshift
    rng = np.random.default_rng(m + 10 * n)
    pot = LocallyConstantPotential(S, 1, rng.standard_normal(S.alphabet_size))
    words = word_array(S, m + n)
    total = pot.birkhoff_sums(words)
    assert np.allclose(total, pot.birkhoff_sums(words[:, :m]) + pot.birkhoff_sums(words[:, m:]))


def test_family_tabulation_matches_direct_values():
    model = demo("golden-mean").model
    fam = SingularValueFamily("psi", 0.4, model, horizon=3)
    table = as_locally_constant(fam)
    words = word_array(model.subshift, 3)
    assert np.allclose(table.values, psi_values(model, words, 0.4))
    with pytest.raises(ModelError):
        as_locally_constant(fam, horizon=2)
