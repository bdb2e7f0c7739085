"""Equilibrium states of locally constant potentials as Markov chains.

The equilibrium state of a depth-``k`` potential is a Markov chain on
admissible ``(k-1)``-words (on symbols when ``k = 1``).  This module builds
those chains and measures how well they satisfy the Gibbs and u-Gibbs
comparisons, the variational principle and the entropy formula.

Conditional measures along unstable slices of a product model are the
forward chain started from the current state: with exact product structure
there is no holonomy, so conditioning on any past gives the same forward
masses, and "almost every point" statements hold at every point.
"""

from dataclasses import dataclass, field

import numpy as np

from ._perron import perron
from .errors import ModelError
from .models import DiagonalHorseshoeModel, band_singular_logs
from .potentials import LocallyConstantPotential, psi_values, _word_codes
from .pressure import pressure_exact, transfer_matrix
from .symbolic import DEFAULT_WORD_CAP, word_array

ROW_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MarkovMeasure:
    """Stationary Markov chain on states of an SFT.

    Attributes
    ----------
    subshift : SubshiftOfFiniteType
    order : int
        States are admissible words of this length (1 means symbols).
    states : ndarray, shape (K, order)
    Q : ndarray, shape (K, K)
        Row-stochastic transition matrix; ``Q[s, s']`` is nonzero only if
        ``s'`` overlaps ``s`` and the joined word is admissible.
    p : ndarray, shape (K,)
        Stationary vector.
    pressure : float or None
        Pressure of the potential the chain was built from, if any.
    """

    subshift: object
    order: int
    states: np.ndarray
    Q: np.ndarray
    p: np.ndarray = None
    pressure: float = None
    potential: object = field(default=None, repr=False)

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=float)
        if np.any(Q < 0):
            raise ModelError("transition probabilities must be nonnegative", "Q")
        if np.max(np.abs(Q.sum(axis=1) - 1)) > ROW_TOL:
            raise ModelError("rows of Q must sum to 1", "Q")
        if self.p is None:
            p = perron(Q.T).right
        else:
            p = np.asarray(self.p, dtype=float)
        p = p / p.sum()
        if np.max(np.abs(p @ Q - p)) > ROW_TOL:
            raise ModelError("p is not stationary for Q", "p")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "p", p)
        codes = _word_codes(self.states, self.subshift.alphabet_size)
        object.__setattr__(self, "_codes", codes)

    @property
    def symbol_marginal(self):
        """Probability of each symbol at a fixed time."""
        out = np.zeros(self.subshift.alphabet_size)
        np.add.at(out, self.states[:, 0], self.p)
        return out

    def state_index(self, windows):
        codes = _word_codes(windows, self.subshift.alphabet_size)
        idx = np.minimum(np.searchsorted(self._codes, codes), len(self._codes) - 1)
        ok = self._codes[idx] == codes
        return idx, ok

    def log_masses(self, words):
        """Log cylinder masses of each row of ``words`` (``-inf`` if inadmissible).

        Words must be at least ``order`` long.
        """
        w = np.asarray(words, dtype=np.int64)
        if w.ndim == 1:
            w = w[None, :]
        k = self.order
        if w.shape[1] < k:
            raise ValueError("word shorter than the chain order")
        idx, ok = self.state_index(w[:, :k])
        with np.errstate(divide="ignore"):
            out = np.where(ok, np.log(self.p[idx]), -np.inf)
            logQ = np.log(self.Q)
        for t in range(1, w.shape[1] - k + 1):
            nxt, ok2 = self.state_index(w[:, t:t + k])
            out = np.where(ok2, out + logQ[idx, nxt], -np.inf)
            idx = nxt
        return out

    def forward_log_masses(self, words):
        """Log mass of each word conditioned on its first state."""
        w = np.asarray(words, dtype=np.int64)
        if w.ndim == 1:
            w = w[None, :]
        idx, _ = self.state_index(w[:, :self.order])
        return self.log_masses(w) - np.log(self.p[idx])


def markov_measure(subshift, Q, p=None):
    """First-order Markov measure on the symbols of ``subshift``."""
    Q = np.asarray(Q, dtype=float)
    if np.any((Q > 0) & (subshift.transitions == 0)):
        raise ModelError("Q charges a forbidden transition", "Q")
    states = np.arange(subshift.alphabet_size)[:, None]
    return MarkovMeasure(subshift, 1, states, Q, p)


def equilibrium_measure(S, pot):
    """Equilibrium state of a locally constant potential.

    With transfer matrix ``M``, Perron root ``rho`` and right/left Perron
    vectors ``h``, ``g``: ``Q[a, b] = M[a, b] h[b] / (rho h[a])`` and
    ``p[a]`` proportional to ``g[a] h[a]``.
    """
    tm = transfer_matrix(S, pot)
    M = tm.matrix.toarray() if hasattr(tm.matrix, "toarray") else np.asarray(tm.matrix, dtype=float)
    h, g, rho = tm.perron.right, tm.perron.left, tm.perron.rho
    Q = M * h[None, :] / (rho * h[:, None])
    Q /= Q.sum(axis=1, keepdims=True)
    p = g * h
    order = max(pot.depth - 1, 1)
    if pot.depth == 1:
        states = np.arange(S.alphabet_size)[:, None]
    else:
        states = tm.states
    return MarkovMeasure(S, order, states, Q, p / p.sum(), tm.log_rho, pot)


def cylinder_mass(mu, word):
    """Mass of the cylinder of ``word``; zero for inadmissible words."""
    word = tuple(int(a) for a in word)
    S = mu.subshift
    if not S.is_admissible(word):
        return 0.0
    if len(word) < mu.order:
        idx = [k for k, s in enumerate(mu.states) if tuple(s[:len(word)]) == word]
        return float(mu.p[idx].sum())
    return float(np.exp(mu.log_masses(np.array(word))[0]))


def entropy(mu):
    """Entropy rate ``-sum p_a Q_ab log Q_ab`` in nats."""
    Q = mu.Q
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(Q > 0, Q * np.log(Q), 0.0)
    return float(-(mu.p @ terms.sum(axis=1)))


def integrate(mu, pot):
    """Expected value of a locally constant potential per step."""
    if pot.depth < mu.order:
        masses = np.array([cylinder_mass(mu, w) for w in pot.words])
    else:
        masses = np.exp(mu.log_masses(pot.words))
    return float(masses @ pot.values)


def variational_gap(mu, pot, P=None):
    """``P - (h_mu + integral of pot)``; zero exactly at the equilibrium state."""
    if P is None:
        P = pressure_exact(mu.subshift, pot)
    return float(P - entropy(mu) - integrate(mu, pot))


def perturbed_measure(mu, rng, scale=0.5):
    """Markov measure on the same support with randomly tilted transitions."""
    Q = mu.Q * np.exp(scale * rng.standard_normal(mu.Q.shape)) * (mu.Q > 0)
    Q /= Q.sum(axis=1, keepdims=True)
    return MarkovMeasure(mu.subshift, mu.order, mu.states, Q)


@dataclass(frozen=True)
class GibbsCertificate:
    """Extremes of the Gibbs ratio over all words up to each length.

    ``c_min[n-1]`` and ``c_max[n-1]`` are cumulative over lengths ``1..n``.
    ``drift`` compares the spread ``c_max/c_min`` at ``reference_length``
    with the spread at the longest length.
    """

    c_min: np.ndarray
    c_max: np.ndarray
    reference_length: int
    drift: float
    drift_tolerance: float

    @property
    def ratio(self):
        return float(self.c_max[-1] / self.c_min[-1])

    @property
    def stable(self):
        return bool(np.isfinite(self.ratio) and self.drift < self.drift_tolerance)


def _edges(mu, pot):
    """Transitions of the chain with the potential value charged on arrival."""
    src, dst = np.nonzero(mu.Q > 0)
    if pot.depth == 1:
        charge = pot.values[mu.states[dst, 0]]
    else:
        windows = np.column_stack([mu.states[src], mu.states[dst, -1]])
        charge = pot.values[pot.index(windows)]
    return src, dst, np.log(mu.Q[src, dst]), charge


def _ratio_extremes(mu, pot, P, n_max, start):
    # max-plus / min-plus dynamic programme over states; exact over all words
    src, dst, logq, charge = _edges(mu, pot)
    K = mu.Q.shape[0]
    k = mu.order if pot.depth > 1 else 1
    if pot.depth == 1:
        init = start + P - pot.values[mu.states[:, 0]]
    else:
        init = start + k * P
    hi, lo = init.copy(), init.copy()
    mins, maxs = [lo.min()], [hi.max()]
    step = logq + P - charge
    for _ in range(k, n_max):
        new_hi = np.full(K, -np.inf)
        new_lo = np.full(K, np.inf)
        np.maximum.at(new_hi, dst, hi[src] + step)
        np.minimum.at(new_lo, dst, lo[src] + step)
        hi, lo = new_hi, new_lo
        mins.append(lo.min())
        maxs.append(hi.max())
    first = k
    return first, np.minimum.accumulate(mins), np.maximum.accumulate(maxs)


def _certificate(first, mins, maxs, n_ref, tol):
    c_min, c_max = np.exp(mins), np.exp(maxs)
    spread = c_max / c_min
    ref = spread[max(n_ref - first, 0)]
    drift = float(spread[-1] / ref - 1)
    return GibbsCertificate(c_min, c_max, max(n_ref, first), drift, tol)


def gibbs_certificate(mu, pot, P, n_max=12, n_ref=8, tol=0.01):
    """Measured Gibbs constants of ``mu`` for ``pot`` at pressure ``P``.

    The ratio ``mu([w]) / exp(-n P + S_n pot(w))`` is bounded above and
    below over every admissible word of length ``n <= n_max`` (extremes are
    found exactly by dynamic programming, not sampling).  ``S_n pot(w)``
    sums the potential over the windows lying inside ``w``.  Supplying the
    wrong ``P`` makes the spread grow geometrically, which the ``drift``
    field exposes.
    """
    with np.errstate(divide="ignore"):
        start = np.log(mu.p)
    first, mins, maxs = _ratio_extremes(mu, pot, P, n_max, start)
    return _certificate(first, mins, maxs, n_ref, tol)


def u_gibbs_certificate(model, mu, pot, n_max=12, n_ref=8, tol=0.01):
    """Gibbs constants of the conditional measures on unstable slices.

    On a product model the conditional measure of a forward cylinder
    ``[x_0 w_1 ... w_{n-1}]`` given any past is the forward chain mass
    ``prod Q``; extremes of its ratio to ``exp(-n P + S_n pot)`` are taken over
    all starting states and forward words.
    """
    if model.subshift is not mu.subshift:
        raise ModelError("measure and model live on different subshifts", "measure")
    P = mu.pressure if mu.pressure is not None else pressure_exact(mu.subshift, pot)
    first, mins, maxs = _ratio_extremes(mu, pot, P, n_max, np.zeros(mu.Q.shape[0]))
    return _certificate(first, mins, maxs, n_ref, tol)


def conditional_mass(mu, past, future):
    """Mass of ``[past . future]`` divided by mass of ``[past]``."""
    past = tuple(past)
    joint = cylinder_mass(mu, past + tuple(future))
    base = cylinder_mass(mu, past)
    return joint / base if base > 0 else 0.0


@dataclass(frozen=True)
class LyapunovExponents:
    """Band exponents and the stable exponent of a measure on a model.

    For cocycle models ``upper_trace`` holds ``(1/n) E[log band_norm]`` along
    ``n = 1, 2, 4, ...``; it is nonincreasing by subadditivity and bounds the
    exponent from above.  ``bands`` is its last entry and ``sampled`` is a
    long-orbit estimate of the limit.
    """

    bands: np.ndarray
    stable: float
    upper_trace: np.ndarray = None
    sampled: np.ndarray = None
    upper_monotone: bool = True


def _sample_path(mu, length, rng):
    K = mu.Q.shape[0]
    cum = np.cumsum(mu.Q, axis=1)
    state = int(rng.choice(K, p=mu.p))
    path = np.empty(length, dtype=np.int64)
    draws = rng.random(length)
    for t in range(length):
        path[t] = mu.states[state, 0]
        state = min(int(np.searchsorted(cum[state], draws[t], side="right")), K - 1)
    return path


def lyapunov_exponents(mu, model, n_max=8, sample_length=20000, seed=0,
                       cap=DEFAULT_WORD_CAP):
    """Lyapunov exponents of a Markov measure on a horseshoe model.

    Parameters
    ----------
    mu : MarkovMeasure
    model : DiagonalHorseshoeModel or CocycleHorseshoeModel
    n_max : int
        Longest word length used for the cocycle upper sequence.
    sample_length, seed : int
        Length and RNG seed of the sampled orbit for cocycle models.
    """
    marginal = mu.symbol_marginal
    stable = float(marginal @ model.log_stable)
    if isinstance(model, DiagonalHorseshoeModel):
        return LyapunovExponents(marginal @ model.log_rates, stable)
    ell = model.bands.band_count
    lengths = [n for n in (2 ** np.arange(8)) if n <= n_max]
    upper = np.zeros((len(lengths), ell))
    for r, n in enumerate(lengths):
        n = int(n)
        words = word_array(mu.subshift, max(n, mu.order), cap)
        w = np.exp(mu.log_masses(words))
        for j in range(ell):
            upper[r, j] = w @ band_singular_logs(model, words[:, :n], j)[0] / n
    rng = np.random.default_rng(seed)
    path = _sample_path(mu, sample_length, rng)
    sampled = np.array([band_singular_logs(model, path[None, :], j)[0][0] / sample_length
                        for j in range(ell)])
    monotone = bool(np.all(np.diff(upper, axis=0) <= 1e-12))
    return LyapunovExponents(upper[-1], stable, upper, sampled, monotone)


def srb_measure(model):
    """Equilibrium state of minus the full unstable log-Jacobian."""
    S = model.subshift
    words = word_array(S, 1)
    pot = LocallyConstantPotential(S, 1, -psi_values(model, words, model.unstable_dim))
    return equilibrium_measure(S, pot)


def pesin_check(model):
    """``|h - sum_j m_j lambda_j|`` for the equilibrium state of ``-log Jac^u``."""
    if not isinstance(model, DiagonalHorseshoeModel):
        raise ModelError("entropy formula check needs a diagonal model", "model")
    mu = srb_measure(model)
    lyap = lyapunov_exponents(mu, model)
    m = np.asarray(model.bands.multiplicities)
    return float(abs(entropy(mu) - m @ lyap.bands))
