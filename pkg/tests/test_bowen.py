import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from bowendim.bowen import (bisect_decreasing, bowen_root_stable, bowen_root_unstable,
                            root_lower_bound_check, root_sequence, stable_root_identity_check)
from bowendim.errors import ModelError
from bowendim.models import DiagonalHorseshoeModel
from bowendim.symbolic import SubshiftOfFiniteType

from conftest import DEMOS, DIAGONAL_DEMOS, demo, diagonal_models

LOG2_LOG3 = np.log(2) / np.log(3)


def test_ternary_root_closed_form():
    r = bowen_root_unstable(demo("ternary").model)
    assert abs(r.root - LOG2_LOG3) <= 1e-9
    assert r.status == "exact"


def test_golden_mean_root_is_entropy_over_log_rate():
    r = bowen_root_unstable(demo("golden-mean").model)
    assert r.root == pytest.approx(np.log((1 + np.sqrt(5)) / 2) / np.log(2), abs=1e-9)


def test_asymmetric_stable_root_solves_two_term_moran_equation():
    oracle = brentq(lambda t: 0.5 ** t + 0.125 ** t - 1, 0, 1, xtol=1e-14)
    assert bowen_root_stable(demo("asymmetric-stable").model).root == pytest.approx(oracle,
                                                                                    abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(1.5, 12.0), min_size=2, max_size=4))
def test_conformal_full_shift_root_matches_moran_oracle(rates):
    l = len(rates)
    model = DiagonalHorseshoeModel(SubshiftOfFiniteType.full(l), (1,), np.array(rates)[:, None],
                                   np.full(l, 0.5 / l))
    r = np.array(rates)
    f = lambda t: np.sum(r ** -t) - 1
    oracle = 1.0 if f(1.0) >= 0 else brentq(f, 0, 1, xtol=1e-14)
    assert bowen_root_unstable(model).root == pytest.approx(oracle, abs=1e-9)


@pytest.mark.parametrize("name", DIAGONAL_DEMOS)
def test_diagonal_root_sequences_constant(name):
    lm = demo(name)
    seq = root_sequence(lm.model, "psi", 3)
    assert np.ptp(seq.roots) <= 1e-9


def test_cocycle_root_sequence_nondecreasing():
    seq = root_sequence(demo("rotation-cocycle").model, "psi", 3)
    assert len(seq.roots) == 4
    assert seq.nondecreasing and seq.worst_violation <= 1e-10
    assert seq.roots[-1] > seq.roots[0]


@settings(max_examples=20, deadline=None)
@given(diagonal_models())
def test_diagonal_roots_level_invariant_and_ordered(model):
    s1 = bowen_root_unstable(model, 1, "psi").root
    s2 = bowen_root_unstable(model, 2, "psi").root
    t_hat = bowen_root_unstable(model, 1, "psihat").root
    assert s2 == pytest.approx(s1, abs=1e-9)
    assert 0 <= s1 <= t_hat + 1e-9 <= model.unstable_dim + 2e-9


@pytest.mark.parametrize("name", DEMOS)
def test_stable_root_identity(name):
    assert stable_root_identity_check(demo(name).model) <= 1e-9


@pytest.mark.parametrize("level", [1, 2, 4, 8])
def test_cocycle_root_lower_bound(level):
    model = demo("rotation-cocycle").model
    root = bowen_root_unstable(model, level).root
    check = root_lower_bound_check(model, root, level)
    assert check.holds


@pytest.mark.parametrize("name", ["diagonal-l2", "srb-mixed", "golden-mean"])
def test_diagonal_root_lower_bound(name):
    model = demo(name).model
    check = root_lower_bound_check(model, bowen_root_unstable(model).root)
    assert check.holds


def test_saturated_model_root_is_unstable_dimension():
    r = bowen_root_unstable(demo("diagonal-l2").model)
    assert r.root == pytest.approx(2.0, abs=1e-9)


def test_bisection_statuses():
    root, _, _, _, status, _ = bisect_decreasing(lambda x: 1 - x, 0, 3)
    assert status == "exact" and root == pytest.approx(1.0, abs=1e-10)
    root, _, _, its, status, _ = bisect_decreasing(lambda x: 5 - x, 0, 3)
    assert status == "clamped" and root == 3 and its == 0
    with pytest.raises(ModelError):
        bisect_decreasing(lambda x: -1 - x, 0, 3)
    _, _, _, its, status, _ = bisect_decreasing(lambda x: 1 - x, 0, 3, tol=1e-30, max_iter=20)
    assert status == "unconverged" and its == 20


def test_tolerance_changes_only_trailing_digits():
    model = demo("ternary").model
    coarse = bowen_root_unstable(model, tol=1e-3).root
    fine = bowen_root_unstable(model, tol=1e-10).root
    assert f"{coarse:.2f}" == f"{fine:.2f}"


def test_levels_must_be_powers_of_two():
    with pytest.raises(ValueError):
        bowen_root_unstable(demo("ternary").model, 3)


@pytest.mark.parametrize("name", DEMOS)
@pytest.mark.parametrize("kind", ["psi", "psihat"])
def test_root_residual_and_trace(name, kind):
    r = bowen_root_unstable(demo(name).model, 2, kind)
    if r.status == "exact":
        assert abs(r.residual) <= 10 * 1e-10
    # trace sorted by parameter shows the pressure strictly decreasing
    pts = sorted(r.trace)
    values = np.array([v for _, v in pts])
    assert np.all(np.diff(values) < 0)
