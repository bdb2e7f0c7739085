"""Box-counting estimates on the geometric realization.

The realized set is approximated by the centres of all depth-``n``
cylinders.  A grid of mesh ``2^-k`` is only informative while the mesh is
at least the largest cylinder side, so the default grid stops there.
"""

from dataclasses import dataclass

import numpy as np

from ..symbolic import DEFAULT_WORD_CAP, word_array


@dataclass(frozen=True)
class BoxCountResult:
    """Least-squares fit of ``log N(delta)`` against ``log(1/delta)``."""

    estimate: float
    r_squared: float
    exponents: np.ndarray
    counts: np.ndarray
    depth: int
    which: str


def _fit(exponents, counts):
    x = exponents * np.log(2.0)
    y = np.log(counts)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(r2)


def _cells(points, k):
    # clip so points on the far face land in the last cell
    n = 2 ** k
    return np.minimum(np.floor(points * n).astype(np.int64), n - 1)


def _unique_rows(cells):
    return np.unique(cells, axis=0)


def unstable_points(realization, depth, cap=DEFAULT_WORD_CAP):
    """Cylinder centres of the unstable slice, with each word's first symbol."""
    words = word_array(realization.model.subshift, depth, cap)
    off, lin = realization.unstable_affine(words)
    sides = np.abs(lin).sum(axis=2).max()
    return off + 0.5 * lin.sum(axis=2), words[:, 0], float(sides)


def stable_points(realization, depth, cap=DEFAULT_WORD_CAP):
    """Stable-slice centres with the most recent past symbol of each.

    A past ``x_{-1} x_{-2} ... x_{-n}`` is admissible when the word
    ``x_{-n} ... x_{-1}`` is; its stable interval applies the maps of
    ``x_{-1}`` outermost.
    """
    words = word_array(realization.model.subshift, depth, cap)
    # word_array rows read forward in time; the stable point of the past
    # ending in w[-1] applies the map of w[-1] last
    off, scale = realization.stable_affine(words)
    return (off + 0.5 * scale)[:, None], words[:, -1], float(scale.max())


def default_exponents(max_side, k_min=1):
    k_max = int(np.floor(-np.log2(max_side)))
    return np.arange(k_min, max(k_max, k_min + 1) + 1)


def box_counting(realization, which="unstable", depth=10, exponents=None,
                 cap=DEFAULT_WORD_CAP):
    """Box-counting dimension estimate of a slice or of the whole set.

    Parameters
    ----------
    realization : GeometricRealization
    which : {"unstable", "stable", "full"}
        ``"full"`` counts cells of the product space occupied by pairs of an
        unstable and a stable cell whose symbols may be joined.
    depth : int
        Cylinder depth used to approximate the set.
    exponents : array_like of int, optional
        Grid meshes ``2^-k``.  Defaults to ``k = 1`` up to the largest ``k``
        whose mesh is not below the largest cylinder side.
    """
    if which == "unstable":
        pts, _, side = unstable_points(realization, depth, cap)
    elif which == "stable":
        pts, _, side = stable_points(realization, depth, cap)
    elif which == "full":
        return _full_box_counting(realization, depth, exponents, cap)
    else:
        raise ValueError(f"unknown set {which!r}")
    ks = default_exponents(side) if exponents is None else np.asarray(exponents)
    counts = np.array([_unique_rows(_cells(pts, k)).shape[0] for k in ks])
    est, r2 = _fit(ks, counts)
    return BoxCountResult(est, r2, ks, counts, depth, which)


def _masks(cells, symbols):
    """Unique cells with the bitmask of symbols seen in each."""
    uniq, inv = np.unique(cells, axis=0, return_inverse=True)
    masks = np.zeros(uniq.shape[0], dtype=np.uint64)
    np.bitwise_or.at(masks, inv.ravel(), np.left_shift(np.uint64(1), symbols.astype(np.uint64)))
    return masks


def _full_box_counting(realization, depth, exponents, cap):
    S = realization.model.subshift
    if S.alphabet_size > 64:
        raise ValueError("full-set counting supports at most 64 symbols")
    upts, ufirst, uside = unstable_points(realization, depth, cap)
    spts, slast, sside = stable_points(realization, depth, cap)
    ks = default_exponents(max(uside, sside)) if exponents is None else np.asarray(exponents)
    # successor mask of each symbol: bit a set iff b -> a is allowed
    succ = np.array([sum(1 << int(a) for a in np.flatnonzero(S.transitions[b]))
                     for b in range(S.alphabet_size)], dtype=np.uint64)
    counts = []
    for k in ks:
        umask = _masks(_cells(upts, k), ufirst)
        smask_sym = _masks(_cells(spts, k), slast)
        # stable cell allows first symbols reachable from any of its past symbols
        allowed = np.zeros_like(smask_sym)
        for b in range(S.alphabet_size):
            has = (smask_sym >> np.uint64(b)) & np.uint64(1)
            allowed |= np.where(has == 1, succ[b], np.uint64(0))
        uu, ucount = np.unique(umask, return_counts=True)
        su, scount = np.unique(allowed, return_counts=True)
        hit = (uu[:, None] & su[None, :]) != 0
        counts.append(int((ucount[:, None] * scount[None, :] * hit).sum()))
    counts = np.array(counts)
    est, r2 = _fit(ks, counts)
    return BoxCountResult(est, r2, ks, counts, depth, "full")
