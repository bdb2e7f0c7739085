import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bowendim.errors import ModelError, NotIrreducibleError, ResourceError
from bowendim.symbolic import (SubshiftOfFiniteType, admissible_words, count_words,
                               power_subshift, topological_entropy, word_array)

from conftest import GOLDEN, irreducible_matrices

GOLDEN_RATIO = (1 + np.sqrt(5)) / 2


def fib(n):
    a, b = 1, 1
    for _ in range(n):
        a, b = b, a + b
    return b


def test_golden_mean_word_counts_are_fibonacci():
    S = SubshiftOfFiniteType(GOLDEN)
    assert [count_words(S, n) for n in range(1, 11)] == [fib(n) for n in range(1, 11)]
    assert count_words(S, 10) == 144


def test_golden_mean_words_in_lexicographic_order():
    S = SubshiftOfFiniteType(GOLDEN)
    assert [tuple(w) for w in word_array(S, 3)] == [
        (0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 0, 1)]
    assert admissible_words(S, 2) == [(0, 0), (0, 1), (1, 0)]


def test_entropy_closed_forms():
    assert topological_entropy(SubshiftOfFiniteType.full(2)) == pytest.approx(np.log(2), abs=1e-15)
    assert topological_entropy(SubshiftOfFiniteType.full(5)) == pytest.approx(np.log(5), abs=1e-15)
    h = topological_entropy(SubshiftOfFiniteType(GOLDEN))
    assert h == pytest.approx(np.log(GOLDEN_RATIO), abs=1e-12)


def test_power_subshift_uses_concatenation():
    S = SubshiftOfFiniteType(GOLDEN)
    P = power_subshift(S, 2)
    assert P.labels == ((0, 0), (0, 1), (1, 0))
    # block v may follow block w when w[-1] -> v[0]
    expected = np.array([[1, 1, 1], [1, 1, 0], [1, 1, 1]])
    assert np.array_equal(P.transitions, expected)
    assert P.transitions.sum() == 8
    assert topological_entropy(P) == pytest.approx(2 * np.log(GOLDEN_RATIO), abs=1e-12)


def test_large_count_does_not_overflow():
    S = SubshiftOfFiniteType.full(7)
    assert count_words(S, 40) == 7 ** 40


def test_word_cap_raises_resource_error():
    with pytest.raises(ResourceError) as info:
        word_array(SubshiftOfFiniteType.full(2), 20, cap=1000)
    assert info.value.limit == 1000
    assert info.value.requested == 2 ** 20


@pytest.mark.parametrize("A, where", [
    ([[1, 1, 0], [1, 1, 0]], "transitions"),
    ([[1, 2], [1, 1]], "transitions"),
    ([[1, 1], [0, 0]], "row"),
    ([[1, 0], [1, 0]], "column"),
])
def test_invalid_matrices_rejected(A, where):
    with pytest.raises(ModelError):
        SubshiftOfFiniteType(np.array(A))


def test_reducible_subshift_is_flagged():
    S = SubshiftOfFiniteType(np.array([[1, 1], [0, 1]]))
    assert not S.irreducible
    with pytest.raises(NotIrreducibleError):
        S.require_irreducible()


def test_matrix_is_read_only():
    S = SubshiftOfFiniteType.full(2)
    with pytest.raises(ValueError):
        S.transitions[0, 0] = 0


@settings(max_examples=40, deadline=None)
@given(irreducible_matrices(), st.integers(1, 6))
def test_count_matches_enumeration(A, n):
    S = SubshiftOfFiniteType(A)
    words = word_array(S, n)
    assert words.shape == (count_words(S, n), n)
    assert all(S.is_admissible(w) for w in words[:50])
    codes = [tuple(w) for w in words]
    assert codes == sorted(codes)


@settings(max_examples=40, deadline=None)
@given(irreducible_matrices(), st.integers(1, 5), st.integers(1, 5))
def test_word_counts_submultiplicative(A, m, n):
    S = SubshiftOfFiniteType(A)
    assert count_words(S, m + n) <= count_words(S, m) * count_words(S, n)


@settings(max_examples=30, deadline=None)
@given(irreducible_matrices(max_size=3), st.integers(2, 3))
def test_power_entropy_scales(A, N):
    # a self-loop makes the shift aperiodic, so its powers stay irreducible
    A = A.copy()
    A[0, 0] = 1
    S = SubshiftOfFiniteType(A)
    assert topological_entropy(power_subshift(S, N)) == pytest.approx(
        N * topological_entropy(S), abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(irreducible_matrices())
def test_entropy_bounded_by_log_alphabet(A):
    S = SubshiftOfFiniteType(A)
    h = topological_entropy(S)
    assert -1e-12 <= h <= np.log(S.alphabet_size) + 1e-12
