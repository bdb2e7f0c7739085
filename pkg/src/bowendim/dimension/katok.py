"""Horseshoes approximating a measure, emulated by typical blocks.

For a target Markov measure, the blocks of length ``n`` whose empirical
entropy and band exponents are within ``eps`` of the target's are retained.
Concatenating retained blocks (a block may follow another when the last
symbol of one may be followed by the first symbol of the next) gives a
subsystem of ``f^n``; its entropy and exponents approximate the target's.

When the model is diagonal on a full shift and the target is Bernoulli,
blocks with the same count of each symbol class are interchangeable, which
keeps long blocks over large alphabets tractable.
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ..errors import BowenDimError
from ..gibbs import entropy, lyapunov_exponents
from ..models import DiagonalHorseshoeModel
from ..pressure import BlockSystem
from ..symbolic import DEFAULT_WORD_CAP, count_words, word_array


class EmptyFamilyError(BowenDimError):
    """No block passed the typicality filters."""

    def __init__(self, message, histogram):
        self.histogram = histogram
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class KatokFamily:
    """Retained blocks with their certificates.

    Attributes
    ----------
    system : BlockSystem
        Concatenation system of the retained blocks (restricted to its
        richest transitive component when the blocks do not all connect).
    retained_fraction : float
        Share of admissible blocks that passed both filters.
    target_entropy, target_exponents : float, ndarray
    entropy : float
        Entropy of the block system per base step.
    entropy_deficit : float
        ``max(target_entropy - entropy, 0)``.
    exponent_spread : float
        Largest deviation of a retained block's band exponent from the target.
    histogram : tuple
        ``(edges, counts)`` of the blocks' empirical entropy deviations.
    """

    system: BlockSystem
    length: int
    eps: float
    retained_fraction: float
    target_entropy: float
    target_exponents: np.ndarray
    entropy: float
    entropy_deficit: float
    exponent_spread: float
    histogram: tuple
    lumped: bool

    def exponent_certificate(self, samples=5, seed=0, tilts=(1.0, 10.0)):
        """Worst band-exponent deviation over equilibrium states on the family.

        The states come from ``samples`` random block potentials and from
        potentials ``+-beta * log_norm`` of each band for every ``beta`` in
        ``tilts``; strong tilts push the state onto the most extreme blocks,
        which random potentials on a large family almost never do.
        """
        rng = np.random.default_rng(seed)
        n = self.length
        potentials = [rng.standard_normal(self.system.size) for _ in range(samples)]
        for j in range(self.system.log_norms.shape[1]):
            for beta in tilts:
                potentials += [beta * self.system.log_norms[:, j],
                               -beta * self.system.log_norms[:, j]]
        worst = 0.0
        for v in potentials:
            pi = self.system.equilibrium_marginal(v)
            lam = pi @ self.system.log_norms / n
            worst = max(worst, float(np.max(np.abs(lam - self.target_exponents))))
        return worst


def _is_bernoulli(mu):
    return mu.order == 1 and np.allclose(mu.Q, mu.Q[0][None, :], atol=1e-12)


def _histogram(dev, weights=None):
    counts, edges = np.histogram(dev, bins=10, weights=weights)
    return edges, counts


def _richest_component(system):
    """Restrict a block system to its highest-entropy transitive component."""
    S = system.model.subshift
    K, l = system.size, S.alphabet_size
    # nodes: blocks 0..K-1, symbols K..K+l-1; block -> its last symbol,
    # symbol c -> block b when c may be followed by the block's first symbol
    rows = [np.arange(K)]
    cols = [K + system.last]
    pred, blk = np.nonzero(S.transitions[:, system.first])
    rows.append(K + pred)
    cols.append(blk)
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    G = csr_matrix((np.ones(len(r)), (r, c)), shape=(K + l, K + l))
    ncomp, labels = connected_components(G, directed=True, connection="strong")
    if ncomp == 1:
        return system
    best, best_h = None, -np.inf
    for comp in np.unique(labels[:K]):
        keep = np.flatnonzero(labels[:K] == comp)
        sub = BlockSystem.from_words(system.model, system.words[keep])
        # a lone block without a self-loop carries no orbit
        if keep.size == 1 and not S.transitions[sub.last[0], sub.first[0]]:
            continue
        h = sub.entropy()
        if h > best_h:
            best, best_h = sub, h
    if best is None:
        raise EmptyFamilyError("retained blocks support no periodic orbit", None)
    return best


def katok_family(model, mu, n, eps, cap=DEFAULT_WORD_CAP, entropy_filter=True,
                 exponent_filter=True, lumped=None):
    """Typical-block subsystem for target measure ``mu``.

    Parameters
    ----------
    model : horseshoe model
    mu : MarkovMeasure
        First-order target on ``model.subshift``.
    n : int
        Block length.
    eps : float
        Typicality slack for entropy and for each band exponent.
    entropy_filter, exponent_filter : bool
        Switch the filters individually (both are needed for the exponent
        certificate on models with unequal rates).
    lumped : bool, optional
        Force or forbid class lumping; by default it is used only when the
        explicit block list would exceed ``cap``.
    """
    if mu.order != 1:
        raise ValueError("target must be a first-order chain")
    h = entropy(mu)
    lam = np.asarray(lyapunov_exponents(mu, model, n_max=n).bands)
    can_lump = (isinstance(model, DiagonalHorseshoeModel) and model.subshift.is_full
                and _is_bernoulli(mu))
    if lumped is None:
        lumped = can_lump and count_words(model.subshift, n) > cap
    if lumped and not can_lump:
        raise ValueError("lumping needs a diagonal model, a full shift and a Bernoulli target")

    if lumped:
        p = mu.Q[0]
        classes, _ = BlockSystem.symbol_classes(model, extra=p)
        full = BlockSystem.lumped_full(model, n, classes)
        reps = np.array([np.flatnonzero(classes == c)[0] for c in range(classes.max() + 1)])
        log_mu = full.class_counts @ np.log(p[reps])
        ent_dev = np.abs(-log_mu / n - h)
        exp_dev = np.abs(full.log_norms / n - lam).max(axis=1)
        keep = np.ones(full.size, dtype=bool)
        if entropy_filter:
            keep &= ent_dev <= eps
        if exponent_filter:
            keep &= exp_dev <= eps
        weights = np.exp(full.log_mult - full.log_count())
        hist = _histogram(ent_dev, weights)
        if not keep.any():
            raise EmptyFamilyError(f"no block of length {n} is {eps}-typical", hist)
        system = BlockSystem(model, n, full.log_norms[keep], full.log_conorms[keep],
                             full.stable[keep], full.log_mult[keep],
                             class_counts=full.class_counts[keep], full=True)
        fraction = float(np.exp(system.log_count() - full.log_count()))
        spread = float(exp_dev[keep].max())
    else:
        words = word_array(model.subshift, n, cap)
        blocks = BlockSystem.from_words(model, words)
        log_mu = mu.log_masses(words)
        ent_dev = np.abs(-log_mu / n - h)
        exp_dev = np.abs(blocks.log_norms / n - lam).max(axis=1)
        keep = np.ones(words.shape[0], dtype=bool)
        if entropy_filter:
            keep &= ent_dev <= eps
        if exponent_filter:
            keep &= exp_dev <= eps
        hist = _histogram(ent_dev)
        if not keep.any():
            raise EmptyFamilyError(f"no block of length {n} is {eps}-typical", hist)
        system = _richest_component(BlockSystem.from_words(model, words[keep]))
        fraction = float(keep.mean())
        spread = float(np.abs(system.log_norms / n - lam).max())
    h_top = system.entropy()
    return KatokFamily(system, n, eps, fraction, h, lam, h_top, max(h - h_top, 0.0),
                       spread, hist, bool(lumped))
