"""Topological pressure of locally constant potentials.

Exact pressure is the log Perron root of a weighted transfer matrix.  A
cylinder partition sum is provided as an independent oracle.  For potentials
given by singular-value families on higher powers of the shift the
:class:`BlockSystem` evaluates pressure without materialising the large
transfer matrix: a block system on words of length ``n`` whose transitions
depend only on the last symbol of one block and the first of the next has
the same nonzero spectrum as an ``l x l`` matrix.

Pressure is always reported per step of the base shift.
"""

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import lgamma

import numpy as np
import scipy.sparse as sp
from scipy.special import logsumexp

from ._perron import DENSE_LIMIT, PerronData, perron
from .errors import ResourceError
from .models import DiagonalHorseshoeModel, band_log_conorms, band_log_norms, stable_logs
from .potentials import (LocallyConstantPotential, SingularValueFamily, as_locally_constant,
                         conorm_weights, unstable_weights, _word_codes)
from .symbolic import (DEFAULT_WORD_CAP, SubshiftOfFiniteType, count_words, power_subshift,
                       word_array)

DEFAULT_LEVEL_CAP = 4


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """Weighted transfer matrix of a locally constant potential.

    States are symbols for depth 1 and admissible ``(depth-1)``-words
    otherwise.  Entries are stored as ``exp(value - log_shift)`` so that large
    potentials cannot overflow; the Perron root of the true matrix is
    ``exp(log_shift) * perron.rho``.
    """

    matrix: object
    log_shift: float
    states: np.ndarray
    depth: int
    perron: PerronData = field(repr=False)

    @property
    def log_rho(self):
        return self.log_shift + float(np.log(self.perron.rho))


def _state_index(states, windows, base):
    codes = _word_codes(states, base)
    return np.searchsorted(codes, _word_codes(windows, base))


def transfer_matrix(S, pot):
    """Build the transfer matrix of ``pot`` and its Perron data.

    For depth one the entry ``(a, b)`` is ``A[a, b] * exp(pot(a))``.  For depth
    ``k > 1`` the entry from state ``w`` to ``w'`` is ``exp(pot(w + w'[-1]))``
    whenever ``w[1:] == w'[:-1]`` and the ``k``-word is admissible.
    """
    S.require_irreducible()
    shift = float(pot.values.max())
    weights = np.exp(pot.values - shift)
    if pot.depth == 1:
        states = np.arange(S.alphabet_size)[:, None]
        M = S.transitions * weights[:, None]
    else:
        states = word_array(S, pot.depth - 1)
        src = _state_index(states, pot.words[:, :-1], S.alphabet_size)
        dst = _state_index(states, pot.words[:, 1:], S.alphabet_size)
        K = states.shape[0]
        M = sp.csr_matrix((weights, (src, dst)), shape=(K, K))
        if K <= DENSE_LIMIT:
            M = M.toarray()
    return TransferMatrix(M, shift, states, pot.depth, perron(M))


def pressure_exact(S, pot):
    """Exact pressure of a locally constant potential on an irreducible SFT."""
    S.require_irreducible()
    if pot.depth == 1 and S.is_full:
        return float(logsumexp(pot.values))
    return transfer_matrix(S, pot).log_rho


def pressure_cylinder_sum(S, pot, n, cap=DEFAULT_WORD_CAP):
    """``(1/n) log`` of the partition sum over admissible ``n``-cylinders.

    Each cylinder contributes the exponential of the largest ``n``-step
    Birkhoff sum over points of the cylinder; for depth ``k > 1`` the last
    ``k - 1`` windows depend on how the word is continued, so the maximum over
    admissible continuations is taken.
    """
    k = pot.depth
    if n < k:
        raise ValueError("n must be at least the potential depth")
    words = word_array(S, n + k - 1, cap)
    sums = pot.birkhoff_sums(words)
    if k > 1:
        # rows sharing the first n symbols are contiguous in lexicographic order
        heads = _word_codes(words[:, :n], S.alphabet_size)
        starts = np.flatnonzero(np.r_[True, heads[1:] != heads[:-1]])
        sums = np.maximum.reduceat(sums, starts)
    return float(logsumexp(sums) / n)


# ---------------------------------------------------------------------------
# block systems


def _log_multinomial(counts):
    counts = np.asarray(counts)
    return lgamma(counts.sum() + 1) - sum(lgamma(c + 1) for c in counts)


@dataclass(frozen=True, eq=False)
class BlockSystem:
    """Concatenations of retained ``n``-blocks of a model's subshift.

    Block ``b`` may follow block ``a`` iff the last symbol of ``a`` may be
    followed by the first symbol of ``b``.  Blocks carry precomputed band
    log-norms, log-conorms and stable logs so that every family can be
    evaluated for any parameter cheaply.  A *lumped* system stands for a full
    shift whose blocks are grouped into classes with equal data; each class
    has a log multiplicity.

    Use :meth:`power`, :meth:`from_words` or :meth:`lumped_full` to build one.
    """

    model: object
    length: int
    log_norms: np.ndarray
    log_conorms: np.ndarray
    stable: np.ndarray
    log_mult: np.ndarray
    first: np.ndarray = None
    last: np.ndarray = None
    words: np.ndarray = None
    class_counts: np.ndarray = None
    full: bool = False

    @classmethod
    def from_words(cls, model, words):
        words = np.asarray(words, dtype=np.int64)
        if words.shape[0] == 0:
            raise ValueError("block system needs at least one block")
        S = model.subshift
        full = S.is_full
        return cls(model, words.shape[1], band_log_norms(model, words),
                   band_log_conorms(model, words), stable_logs(model, words),
                   np.zeros(words.shape[0]), words[:, 0].copy(), words[:, -1].copy(),
                   words, None, full)

    @classmethod
    def power(cls, model, N, cap=DEFAULT_WORD_CAP):
        """All admissible ``N``-words: the ``N``-th power of the model's shift."""
        return cls.from_words(model, word_array(model.subshift, N, cap))

    @staticmethod
    def symbol_classes(model, extra=None):
        """Group symbols with identical rates (and identical ``extra`` values)."""
        rows = [model.unstable_rates[i].tolist() + [model.stable_rates[i]]
                + ([] if extra is None else [extra[i]]) for i in range(model.alphabet_size)]
        keys = sorted(set(map(tuple, rows)))
        return np.array([keys.index(tuple(r)) for r in rows]), len(keys)

    @classmethod
    def lumped_full(cls, model, N, classes=None):
        """Full-shift ``N``-blocks grouped by how often each symbol class occurs.

        Only valid for diagonal models on a full shift, where every family
        value of a block depends on its class counts alone.
        """
        if not isinstance(model, DiagonalHorseshoeModel) or not model.subshift.is_full:
            raise ValueError("lumping requires a diagonal model on a full shift")
        if classes is None:
            classes, k = cls.symbol_classes(model)
        else:
            classes = np.asarray(classes)
            k = int(classes.max()) + 1
        sizes = np.bincount(classes, minlength=k)
        reps = np.array([np.flatnonzero(classes == c)[0] for c in range(k)])
        types = []
        for combo in combinations_with_replacement(range(k), N):
            types.append(np.bincount(combo, minlength=k))
        counts = np.array(types)
        log_mult = np.array([_log_multinomial(c) + float(c @ np.log(sizes)) for c in counts])
        log_norms = counts @ model.log_rates[reps]
        stable = counts @ model.log_stable[reps]
        return cls(model, N, log_norms, log_norms.copy(), stable, log_mult,
                   class_counts=counts, full=True)

    @property
    def size(self):
        return self.log_mult.shape[0]

    def log_count(self):
        """Log of the number of blocks represented."""
        return float(logsumexp(self.log_mult))

    def values(self, kind, parameter):
        """Family values on every block."""
        SingularValueFamily(kind, parameter, self.model)  # validates
        if kind == "psi":
            return self.log_norms @ unstable_weights(self.model.bands, parameter)
        if kind == "psihat":
            return self.log_conorms @ conorm_weights(self.model.bands, parameter)
        return parameter * self.stable

    def pressure_of_values(self, values):
        """Per-base-step pressure of a block potential."""
        v = np.asarray(values, dtype=float) + self.log_mult
        if self.full:
            return float(logsumexp(v) / self.length)
        shift = v.max()
        l = self.model.alphabet_size
        W = np.zeros((l, l))
        np.add.at(W, (self.first, self.last), np.exp(v - shift))
        G = self.model.subshift.transitions @ W
        # G is l x l; its Perron root equals that of the block transfer matrix
        rho = float(np.max(np.abs(np.linalg.eigvals(G))))
        return float((shift + np.log(rho)) / self.length)

    def equilibrium_marginal(self, values):
        """Block probabilities of the equilibrium state of a block potential.

        With ``W[f, d]`` the total weight of blocks from first symbol ``f`` to
        last symbol ``d``, the right Perron vector of ``A W`` and the left
        Perron vector of ``W A`` determine the block marginal.
        """
        v = np.asarray(values, dtype=float) + self.log_mult
        w = np.exp(v - v.max())
        if self.full:
            return w / w.sum()
        l = self.model.alphabet_size
        A = self.model.subshift.transitions.astype(float)
        W = np.zeros((l, l))
        np.add.at(W, (self.first, self.last), w)

        def top(M):
            vals, vecs = np.linalg.eig(M)
            return np.abs(vecs[:, int(np.argmax(vals.real))].real)

        y = top(A @ W)
        z = top((W @ A).T)
        pi = z[self.first] * w * y[self.last]
        return pi / pi.sum()

    def pressure(self, kind, parameter, sign=-1.0):
        """Per-base-step pressure of ``sign`` times a family member."""
        return self.pressure_of_values(sign * self.values(kind, parameter))

    def entropy(self):
        """Per-base-step topological entropy of the block system."""
        return self.pressure_of_values(np.zeros(self.size))

    def subshift(self):
        """Explicit SFT over the blocks (not available for lumped systems)."""
        if self.words is None:
            raise ValueError("lumped block systems have no explicit subshift")
        T = self.model.subshift.transitions[np.ix_(self.last, self.first)]
        return SubshiftOfFiniteType(T, labels=tuple(map(tuple, self.words.tolist())))


def block_system(model, N, cap=DEFAULT_WORD_CAP):
    """Power block system, lumped when the explicit alphabet would exceed ``cap``."""
    if count_words(model.subshift, N) <= cap:
        return BlockSystem.power(model, N, cap)
    if isinstance(model, DiagonalHorseshoeModel) and model.subshift.is_full:
        return BlockSystem.lumped_full(model, N)
    total = count_words(model.subshift, N)
    raise ResourceError(f"power alphabet of {total} words exceeds the word cap {cap}",
                        limit=cap, requested=total)


def pressure_power(model, kind, parameter, N, cap=DEFAULT_WORD_CAP, sign=-1.0):
    """``(1/N) P(f^N, sign * family_N)`` built literally on the power subshift.

    The family is tabulated on admissible ``N``-words, viewed as a depth-one
    potential on the ``N``-th power shift, and its exact pressure is divided
    by ``N``.  ``sign=-1`` gives the usual Bowen-equation potential for the
    unstable families; pass ``sign=1`` for the stable family.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    family = SingularValueFamily(kind, parameter, model, horizon=N)
    table = as_locally_constant(family, N, cap)
    SN = power_subshift(model.subshift, N, cap)
    pot = LocallyConstantPotential(SN, 1, sign * table.values)
    return pressure_exact(SN, pot) / N


@dataclass(frozen=True)
class SuperadditiveTrace:
    """Pressures at levels ``2^0 .. 2^K`` with a monotonicity certificate."""

    estimate: float
    levels: tuple
    values: tuple
    nondecreasing: bool
    increase: float


def superadditive_pressure(model, kind, parameter, max_level=DEFAULT_LEVEL_CAP,
                           cap=DEFAULT_WORD_CAP, sign=-1.0, tol=1e-10):
    """Limit estimate of ``(1/n) P(f^n, sign * family_n)`` along ``n = 2^k``."""
    if max_level < 0:
        raise ValueError("max_level must be >= 0")
    levels, values = [], []
    for k in range(max_level + 1):
        N = 2 ** k
        values.append(block_system(model, N, cap).pressure(kind, parameter, sign))
        levels.append(N)
    diffs = np.diff(values)
    return SuperadditiveTrace(values[-1], tuple(levels), tuple(values),
                              bool(np.all(diffs >= -tol)), values[-1] - values[0])
