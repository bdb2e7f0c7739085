import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bowendim.errors import ModelError
from bowendim.models import (BandStructure, CocycleHorseshoeModel, DiagonalHorseshoeModel,
                             GeometricRealization, band_log_conorms, band_log_norms,
                             band_singular_logs, realize_cylinder, stable_logs)
from bowendim.symbolic import SubshiftOfFiniteType, word_array

from conftest import demo, diagonal_models


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def test_band_structure_sums():
    b = BandStructure((2, 1, 3))
    assert b.unstable_dim == 6
    assert list(b.partial_sums) == [0, 2, 3, 6]
    assert list(b.reversed_sums) == [0, 3, 4, 6]
    assert list(b.coordinate_band()) == [0, 0, 1, 2, 2, 2]


def test_domination_violation_names_band():
    with pytest.raises(ModelError) as info:
        DiagonalHorseshoeModel(SubshiftOfFiniteType.full(2), (1, 1),
                               np.array([[4.0, 5.0], [4.0, 2.0]]), np.array([0.3, 0.3]))
    assert info.value.location == "unstable_rates[*][1]"


@pytest.mark.parametrize("rates, stable, location", [
    ([[1.0], [3.0]], [0.3, 0.3], "unstable_rates[0][0]"),
    ([[3.0], [3.0]], [0.3, 1.0], "stable_rates[1]"),
    ([[3.0], [3.0]], [0.0, 0.3], "stable_rates[0]"),
])
def test_rate_ranges(rates, stable, location):
    with pytest.raises(ModelError) as info:
        DiagonalHorseshoeModel(SubshiftOfFiniteType.full(2), (1,), np.array(rates),
                               np.array(stable))
    assert info.value.location == location


def test_cocycle_domination_checked_by_singular_values():
    S = SubshiftOfFiniteType.full(2)
    strong = np.array([np.diag([5.0, 4.0])] * 2)
    weak = np.array([[[4.5]], [[2.0]]])
    with pytest.raises(ModelError):
        CocycleHorseshoeModel(S, (2, 1), (strong, weak), np.array([0.2, 0.2]))
    with pytest.raises(ModelError):
        CocycleHorseshoeModel(S, (4,), (np.array([np.eye(4) * 3] * 2),), np.array([0.2, 0.2]))


def test_cocycle_norms_match_direct_products():
    model = demo("rotation-cocycle").model
    B = model.band_matrices[0]
    words = word_array(model.subshift, 6)
    log_norm, log_conorm = band_singular_logs(model, words, 0)
    for w, ln, lc in zip(words, log_norm, log_conorm):
        P = np.eye(2)
        for a in w:
            P = B[a] @ P
        sv = np.linalg.svd(P, compute_uv=False)
        assert ln == pytest.approx(np.log(sv[0]), abs=1e-10)
        assert lc == pytest.approx(np.log(sv[-1]), abs=1e-10)


def test_long_products_do_not_overflow():
    model = CocycleHorseshoeModel(SubshiftOfFiniteType.full(2), (2,),
                                  (np.array([rotation(0.3) @ np.diag([30.0, 20.0]),
                                             rotation(-0.4) @ np.diag([25.0, 21.0])]),),
                                  np.array([0.01, 0.01]))
    w = np.zeros((1, 400), dtype=np.int64)
    ln, lc = band_singular_logs(model, w, 0)
    assert np.isfinite(ln[0]) and ln[0] > lc[0] > 400 * np.log(20)


@settings(max_examples=30, deadline=None)
@given(diagonal_models(), st.integers(1, 5))
def test_diagonal_norms_are_rate_sums(model, n):
    words = word_array(model.subshift, n)
    expected = np.log(model.unstable_rates)[words].sum(axis=1)
    assert np.allclose(band_log_norms(model, words), expected)
    assert np.allclose(band_log_conorms(model, words), expected)
    assert np.all(stable_logs(model, words) < 0)


@settings(max_examples=25, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.integers(1, 5), st.integers(1, 5))
def test_cocycle_norm_submultiplicative_and_conorm_supermultiplicative(a, b, m, n):
    mats = np.array([rotation(a) @ np.diag([3.0, 1.5]), rotation(b) @ np.diag([2.5, 1.2])])
    model = CocycleHorseshoeModel(SubshiftOfFiniteType.full(2), (2,), (mats,),
                                  np.array([0.3, 0.3]))
    rng = np.random.default_rng(m * 7 + n)
    u = rng.integers(0, 2, m)
    v = rng.integers(0, 2, n)
    uv = np.concatenate([u, v])
    nu, cu = band_singular_logs(model, u, 0)
    nv, cv = band_singular_logs(model, v, 0)
    nuv, cuv = band_singular_logs(model, uv, 0)
    assert nuv[0] <= nu[0] + nv[0] + 1e-10
    assert cuv[0] >= cu[0] + cv[0] - 1e-10
    assert cuv[0] <= nuv[0] + 1e-12


def test_realized_cylinders_nest_and_have_expected_sides():
    real = demo("diagonal-l2").realization
    model = real.model
    child = realize_cylinder(real, [3, 10]).outer
    # unstable factor nests under the first symbol, stable factor under the last
    first = realize_cylinder(real, [3]).outer
    last = realize_cylinder(real, [10]).outer
    assert np.all(child.lower[:2] >= first.lower[:2]) and np.all(child.upper[:2] <= first.upper[:2])
    assert last.lower[2] <= child.lower[2] and child.upper[2] <= last.upper[2]
    sides = child.sides
    assert np.allclose(sides[:2], 1 / (model.unstable_rates[3] * model.unstable_rates[10]))
    assert sides[2] == pytest.approx(model.stable_rates[3] * model.stable_rates[10])


def test_cocycle_inner_box_inside_outer():
    real = demo("rotation-cocycle").realization
    for w in word_array(real.model.subshift, 4):
        boxes = realize_cylinder(real, w)
        assert boxes.outer.contains(boxes.inner)


def test_cylinders_of_same_length_are_disjoint():
    real = demo("golden-mean").realization
    words = word_array(real.model.subshift, 5)
    lo, hi = real.unstable_boxes(words)
    order = np.argsort(lo[:, 0])
    assert np.all(hi[order[:-1], 0] <= lo[order[1:], 0] + 1e-12)


def test_overlapping_placement_rejected():
    model = demo("ternary").model
    with pytest.raises(ModelError) as info:
        GeometricRealization(model, np.array([[0.0], [0.2]]))
    assert info.value.location == "placement.unstable[1]"
    with pytest.raises(ModelError):
        GeometricRealization(model, np.array([[0.0], [0.8]]))
