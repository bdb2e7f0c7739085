"""Subshifts of finite type: admissible words, counts, entropy, higher powers.

Words are tuples of ints over ``range(alphabet_size)``.  Every enumeration in
the package goes through :func:`word_array`, which yields words in
lexicographic order so that reductions are reproducible bit for bit.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from ._perron import spectral_radius
from .errors import ModelError, NotIrreducibleError, ResourceError

DEFAULT_WORD_CAP = 2_000_000


@dataclass(frozen=True, eq=False)
class SubshiftOfFiniteType:
    """Two-sided topological Markov chain given by a 0/1 transition matrix.

    Parameters
    ----------
    transitions : array_like
        Square 0/1 matrix; entry ``[i, j]`` is 1 iff ``j`` may follow ``i``.
    labels : tuple, optional
        Names for the symbols.  Power subshifts store the underlying words here.
    """

    transitions: np.ndarray
    labels: tuple = None
    irreducible: bool = field(init=False)

    def __post_init__(self):
        A = np.array(self.transitions)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
            raise ModelError("transition matrix must be square and nonempty", "transitions")
        if not np.all((A == 0) | (A == 1)):
            raise ModelError("transition matrix entries must be 0 or 1", "transitions")
        A = A.astype(np.int8)
        for i in range(A.shape[0]):
            if not A[i].any():
                raise ModelError(f"symbol {i} has no successor", f"transitions[{i}]")
            if not A[:, i].any():
                raise ModelError(f"symbol {i} has no predecessor", f"transitions[:, {i}]")
        A.setflags(write=False)
        object.__setattr__(self, "transitions", A)
        if self.labels is not None and len(self.labels) != A.shape[0]:
            raise ModelError("labels must match the alphabet size", "labels")
        ncomp, _ = connected_components(A, directed=True, connection="strong")
        object.__setattr__(self, "irreducible", ncomp == 1)

    @classmethod
    def full(cls, alphabet_size):
        """Full shift on ``alphabet_size`` symbols."""
        return cls(np.ones((alphabet_size, alphabet_size), dtype=np.int8))

    @property
    def alphabet_size(self):
        return self.transitions.shape[0]

    @property
    def is_full(self):
        return bool(self.transitions.all())

    def is_admissible(self, word):
        word = tuple(word)
        if not word or any(not 0 <= a < self.alphabet_size for a in word):
            return False
        return all(self.transitions[a, b] for a, b in zip(word, word[1:]))

    def require_irreducible(self):
        if not self.irreducible:
            raise NotIrreducibleError("operation requires an irreducible subshift")

    def __repr__(self):
        return f"SubshiftOfFiniteType(alphabet_size={self.alphabet_size}, irreducible={self.irreducible})"


def count_words(S, n):
    """Number of admissible words of length ``n``.

    Uses exact integer matrix powers (Python ints), so large ``n`` never wraps
    around.
    """
    if n < 1:
        raise ValueError("word length must be >= 1")
    A = S.transitions.astype(object)
    v = np.ones(S.alphabet_size, dtype=object)
    for _ in range(n - 1):
        v = A.dot(v)
    return int(sum(v))


def word_array(S, n, cap=DEFAULT_WORD_CAP, start=None):
    """Admissible words of length ``n`` as an ``(count, n)`` int array.

    Rows are in lexicographic order.  ``start`` restricts the first symbol.
    """
    if n < 1:
        raise ValueError("word length must be >= 1")
    total = count_words(S, n)
    if total > cap:
        raise ResourceError(
            f"{total} admissible words of length {n} exceed the word cap {cap}",
            limit=cap,
            requested=total,
        )
    A = S.transitions
    if start is None:
        words = np.arange(S.alphabet_size, dtype=np.int64)[:, None]
    else:
        words = np.array([[start]], dtype=np.int64)
    for _ in range(n - 1):
        parent, nxt = np.nonzero(A[words[:, -1]])
        words = np.column_stack([words[parent], nxt])
    return words


def admissible_words(S, n, cap=DEFAULT_WORD_CAP):
    """Lexicographically ordered list of admissible words of length ``n``."""
    return [tuple(int(a) for a in row) for row in word_array(S, n, cap)]


def topological_entropy(S):
    """Topological entropy in nats: log of the spectral radius."""
    S.require_irreducible()
    if S.is_full:
        return float(np.log(S.alphabet_size))
    return float(np.log(spectral_radius(S.transitions.astype(float))))


def power_subshift(S, N, cap=DEFAULT_WORD_CAP):
    """The N-th higher power: alphabet of admissible N-words of ``S``.

    The transition from ``w`` to ``w2`` is allowed iff ``w + w2`` is admissible.
    Labels of the returned subshift are the N-words, in lexicographic order.
    """
    if N < 1:
        raise ValueError("power must be >= 1")
    if N == 1:
        return S
    words = word_array(S, N, cap)
    T = S.transitions[np.ix_(words[:, -1], words[:, 0])]
    labels = tuple(tuple(int(a) for a in w) for w in words)
    return SubshiftOfFiniteType(T, labels=labels)
