"""Ball masses of conditional measures on unstable and stable slices.

A slice of a realized horseshoe is coded by one-sided sequences: futures for
the unstable slice, pasts (most recent symbol first) for the stable slice.
Each letter acts by an affine contraction, a Markov chain gives the letter
probabilities, and the mass of a Euclidean ball is estimated by a stopping
cover: cylinders missing the ball are dropped, cylinders inside it are
counted whole, and the remaining ones are refined until their longest side
is at most the radius.  The estimate is therefore an upper bound that is
within a bounded factor of the true mass.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ResourceError

NODE_CAP = 4_000_000


@dataclass(frozen=True)
class LetterSystem:
    """Affine letters with Markov transition probabilities.

    Attributes
    ----------
    offsets : ndarray, shape (K, d)
    linear : ndarray, shape (K, d, d)
        Letter ``a`` maps ``x`` to ``offsets[a] + linear[a] @ x``.
    log_init : ndarray, shape (K,)
        Log probability of the first letter.
    log_trans : ndarray, shape (K, K)
        Log transition probabilities between consecutive letters.
    """

    offsets: np.ndarray
    linear: np.ndarray
    log_init: np.ndarray
    log_trans: np.ndarray

    @property
    def dim(self):
        return self.offsets.shape[1]

    def with_init(self, log_init):
        return LetterSystem(self.offsets, self.linear, np.asarray(log_init, dtype=float),
                            self.log_trans)


def _safe_log(x):
    with np.errstate(divide="ignore"):
        return np.log(x)


def _letter_words(mu):
    if mu.subshift.labels is not None:
        return np.array(mu.subshift.labels, dtype=np.int64)
    return np.arange(mu.subshift.alphabet_size)[:, None]


def unstable_letters(realization, mu):
    """Forward letters for the unstable slice under Markov measure ``mu``.

    ``mu`` lives on the model's subshift or on one of its powers (whose
    labels are the underlying words).
    """
    if mu.order != 1:
        raise ValueError("ball masses need a first-order chain")
    words = _letter_words(mu)
    off, lin = realization.unstable_affine(words)
    return LetterSystem(off, lin, _safe_log(mu.p), _safe_log(mu.Q))


def stable_letters(realization, mu):
    """Backward letters for the stable slice under ``mu``.

    Reading the past from the most recent symbol, the chain is the time
    reversal ``R[b, a] = p[a] Q[a, b] / p[b]``.
    """
    if mu.order != 1:
        raise ValueError("ball masses need a first-order chain")
    words = _letter_words(mu)
    # a block read backwards applies its stable maps from last symbol to first
    off, scale = realization.stable_affine(words)
    R = (mu.p[:, None] * mu.Q).T / mu.p[:, None]
    return LetterSystem(off[:, None], scale[:, None, None], _safe_log(mu.p), _safe_log(R))


def sample_word(letters, length, rng, first=None):
    """Random letter sequence drawn from the chain."""
    P = np.exp(letters.log_trans)
    p0 = np.exp(letters.log_init)
    out = np.empty(length, dtype=np.int64)
    out[0] = rng.choice(len(p0), p=p0 / p0.sum()) if first is None else first
    for t in range(1, length):
        row = P[out[t - 1]]
        out[t] = rng.choice(len(row), p=row / row.sum())
    return out


def point_of(letters, word):
    """Centre of the cylinder of ``word``."""
    x = np.zeros(letters.dim)
    lin = np.eye(letters.dim)
    for a in word:
        x = x + lin @ letters.offsets[a]
        lin = lin @ letters.linear[a]
    return x + 0.5 * lin.sum(axis=1)


def ball_mass(letters, point, r, node_cap=NODE_CAP, resolution=1.0):
    """Stopping-cover estimate of the mass of the Euclidean ball ``B(point, r)``.

    The chain starts from ``letters.log_init``; pass a conditioned
    ``log_init`` (a row of the transition matrix) to condition on the past.
    Cylinders straddling the sphere are refined until their longest side is
    at most ``resolution * r``; smaller values tighten the estimate.
    """
    point = np.asarray(point, dtype=float)
    d = letters.dim
    K = letters.offsets.shape[0]
    live = np.isfinite(letters.log_init)
    off = letters.offsets[live]
    lin = letters.linear[live].copy()
    logm = letters.log_init[live]
    last = np.flatnonzero(live)
    total = 0.0
    visited = 0
    while off.shape[0]:
        visited += off.shape[0]
        if visited > node_cap:
            raise ResourceError(f"ball cover exceeded {node_cap} cylinders", limit=node_cap,
                                requested=visited)
        lower = off + np.minimum(lin, 0).sum(axis=2)
        upper = lower + np.abs(lin).sum(axis=2)
        gap = np.maximum(np.maximum(lower - point, point - upper), 0)
        meets = np.einsum("kd,kd->k", gap, gap) <= r * r
        far = np.maximum(np.abs(point - lower), np.abs(upper - point))
        inside = np.einsum("kd,kd->k", far, far) <= r * r
        small = (upper - lower).max(axis=1) <= resolution * r
        done = meets & (inside | small)
        if done.any():
            total += float(np.exp(logm[done]).sum())
        refine = meets & ~done
        if not refine.any():
            break
        off, lin, logm, last = off[refine], lin[refine], logm[refine], last[refine]
        # children: every admissible next letter
        step = letters.log_trans[last]
        parent, child = np.nonzero(np.isfinite(step))
        off = off[parent] + np.einsum("kab,kb->ka", lin[parent], letters.offsets[child])
        lin = lin[parent] @ letters.linear[child]
        logm = logm[parent] + step[parent, child]
        last = child
    return total


def radius_grid(k_min=4, k_max=12, r0=1.0):
    """Radii ``r0 * 2^-k`` for ``k = k_min .. k_max``."""
    return r0 * 2.0 ** -np.arange(k_min, k_max + 1)


def regression_slope(radii, masses):
    """Least-squares slope of ``log mass`` against ``log r``."""
    x, y = np.log(radii), np.log(masses)
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


@dataclass(frozen=True)
class SlopeSample:
    """Ball-mass regressions at a set of sample points."""

    radii: np.ndarray
    masses: np.ndarray  # shape (points, radii)
    slopes: np.ndarray

    @property
    def lower(self):
        return float(self.slopes.min())

    @property
    def upper(self):
        return float(self.slopes.max())


def sample_points(letters, count, r_min, rng):
    """Typical points of the chain, each with the letter preceding it.

    Returns ``(points, pasts)`` where ``pasts[i]`` is a letter that may
    precede the sampled word (``-1`` when the letter system has no
    predecessor information).
    """
    scale = max(np.abs(letters.linear).sum(axis=2).max(), 1e-300)
    length = int(np.ceil(np.log(1e-6 * r_min) / np.log(scale))) + 1
    pts, pasts = [], []
    for _ in range(count):
        word = sample_word(letters, length + 1, rng)
        pasts.append(word[0])
        pts.append(point_of(letters, word[1:]))
    return np.array(pts), np.array(pasts)


def slice_slopes(letters, radii, count=4, seed=0, node_cap=NODE_CAP):
    """Regression slopes of conditional ball masses at ``count`` typical points.

    Each point is conditioned on the letter preceding it, which is how the
    conditional measure on a slice of a product model looks.
    """
    rng = np.random.default_rng(seed)
    points, pasts = sample_points(letters, count, min(radii), rng)
    masses = np.zeros((count, len(radii)))
    for i, (x, past) in enumerate(zip(points, pasts)):
        cond = letters.with_init(letters.log_trans[past])
        for k, r in enumerate(radii):
            masses[i, k] = ball_mass(cond, x, r, node_cap)
    slopes = np.array([regression_slope(radii, m) for m in masses])
    return SlopeSample(np.asarray(radii), masses, slopes)


def unstable_ball_mass(realization, mu, prefix, r, past=None):
    """Conditional mass of the unstable ball of radius ``r`` at a coded point.

    Parameters
    ----------
    realization : GeometricRealization
    mu : MarkovMeasure
        First-order chain on the model's subshift or one of its powers.
    prefix : sequence of int
        Future itinerary (letters of ``mu``) locating the point; the point is
        the centre of its cylinder.
    r : float
    past : int, optional
        Letter preceding the point; the forward chain starts from its row of
        transition probabilities.  Defaults to the stationary start.
    """
    letters = unstable_letters(realization, mu)
    if r > 1:
        raise ValueError("radius exceeds the realization scale")
    if past is not None:
        letters = letters.with_init(letters.log_trans[past])
    return ball_mass(letters, point_of(letters, prefix), r)


def stable_ball_mass(realization, mu, past_word, r, current=None):
    """Conditional mass of the stable ball at the point with past ``past_word``.

    ``past_word`` lists the past from the most recent letter backwards.
    """
    letters = stable_letters(realization, mu)
    if r > 1:
        raise ValueError("radius exceeds the realization scale")
    if current is not None:
        letters = letters.with_init(letters.log_trans[current])
    return ball_mass(letters, point_of(letters, past_word), r)


def pointwise_dimension_bracket(realization, mu, radii=None, count=4, seed=0):
    """Min and max ball-mass regression slopes over typical points."""
    radii = radius_grid() if radii is None else np.asarray(radii)
    sample = slice_slopes(unstable_letters(realization, mu), radii, count, seed)
    return sample.lower, sample.upper
