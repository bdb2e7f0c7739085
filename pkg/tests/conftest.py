import functools

import numpy as np
import pytest
from hypothesis import strategies as st

from bowendim.modelfile import load_demo
from bowendim.models import BandStructure, DiagonalHorseshoeModel
from bowendim.symbolic import SubshiftOfFiniteType

GOLDEN = np.array([[1, 1], [1, 0]])
DEMOS = ("ternary", "golden-mean", "asymmetric-stable", "full-2-shift", "diagonal-l2",
         "srb-mixed", "rotation-cocycle")
DIAGONAL_DEMOS = tuple(d for d in DEMOS if d != "rotation-cocycle")


@functools.lru_cache(maxsize=None)
def demo(name):
    return load_demo(name)


@pytest.fixture(params=DEMOS)
def any_demo(request):
    return demo(request.param)


@st.composite
def irreducible_matrices(draw, min_size=2, max_size=4):
    """0/1 matrices containing a full cycle, hence irreducible."""
    n = draw(st.integers(min_size, max_size))
    bits = draw(st.lists(st.booleans(), min_size=n * n, max_size=n * n))
    A = np.array(bits, dtype=np.int8).reshape(n, n)
    perm = draw(st.permutations(range(n)))
    for i in range(n):
        A[perm[i], perm[(i + 1) % n]] = 1
    return A


@st.composite
def diagonal_models(draw, max_symbols=3, max_bands=2):
    """Random dominated diagonal models on irreducible subshifts."""
    A = draw(irreducible_matrices(2, max_symbols))
    l = A.shape[0]
    k = draw(st.integers(1, max_bands))
    mult = tuple(draw(st.lists(st.integers(1, 2), min_size=k, max_size=k)))
    # band j rates drawn from disjoint, decreasing ranges keep domination
    cols = []
    for j in range(k):
        lo = 1.2 + 3.0 * (k - 1 - j)
        cols.append(draw(st.lists(st.floats(lo, lo + 2.5), min_size=l, max_size=l)))
    rates = np.array(cols).T
    c = draw(st.lists(st.floats(0.05, 0.6), min_size=l, max_size=l))
    return DiagonalHorseshoeModel(SubshiftOfFiniteType(A), BandStructure(mult), rates,
                                  np.array(c))


def markov_matrix(rng, A):
    Q = rng.random(A.shape) * A
    return Q / Q.sum(axis=1, keepdims=True)


CRITERIA = []


@pytest.fixture
def record_criterion():
    """Record ``(number, passed, detail)``; lines are printed in the terminal summary."""
    def record(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        CRITERIA.append((number, line))
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(CRITERIA):
            terminalreporter.write_line(line)
