"""Linear horseshoe models with a dominated splitting of the unstable bundle.

Two flavours are provided.  In a :class:`DiagonalHorseshoeModel` every symbol
expands each unstable band by a scalar rate.  In a :class:`CocycleHorseshoeModel`
each band carries its own small invertible matrix per symbol, so norms and
conorms of long products genuinely differ.  Both carry a one-dimensional stable
band with a contraction rate per symbol.

Bands are indexed from 0 in code.  Words may be passed as tuples or as 2-d
integer arrays (one word per row); the vectorised ``*_logs`` functions accept
the latter and are what the pressure and dimension code use.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError
from .symbolic import SubshiftOfFiniteType


@dataclass(frozen=True)
class BandStructure:
    """Multiplicities of the unstable bands, strongest band first."""

    multiplicities: tuple

    def __post_init__(self):
        m = tuple(int(x) for x in self.multiplicities)
        if not m:
            raise ModelError("at least one unstable band is required", "bands")
        for j, mj in enumerate(m):
            if mj < 1:
                raise ModelError("band multiplicities must be >= 1", f"bands[{j}]")
        object.__setattr__(self, "multiplicities", m)

    @property
    def band_count(self):
        return len(self.multiplicities)

    @property
    def partial_sums(self):
        """``(0, m_0, m_0 + m_1, ..., u)``."""
        return np.concatenate([[0], np.cumsum(self.multiplicities)]).astype(int)

    @property
    def reversed_sums(self):
        """Partial sums taken from the weakest band upwards."""
        return np.concatenate([[0], np.cumsum(self.multiplicities[::-1])]).astype(int)

    @property
    def unstable_dim(self):
        return int(sum(self.multiplicities))

    def coordinate_band(self):
        """Band index of each unstable coordinate."""
        return np.repeat(np.arange(self.band_count), self.multiplicities)


def _as_subshift(subshift):
    if isinstance(subshift, SubshiftOfFiniteType):
        return subshift
    return SubshiftOfFiniteType(np.asarray(subshift))


def _check_stable(stable_rates, size):
    c = np.asarray(stable_rates, dtype=float)
    if c.ndim != 1:
        raise ModelError("exactly one stable rate per symbol is expected (stable band is 1-d)",
                         "stable_rates")
    if c.shape != (size,):
        raise ModelError(f"expected {size} stable rates, got {c.shape[0]}", "stable_rates")
    for i, ci in enumerate(c):
        if not 0 < ci < 1:
            raise ModelError(f"stable rate {ci} not in (0, 1)", f"stable_rates[{i}]")
    return c


@dataclass(frozen=True, eq=False)
class DiagonalHorseshoeModel:
    """Per-symbol scalar expansion on each band plus a stable contraction.

    Parameters
    ----------
    subshift : SubshiftOfFiniteType
    bands : BandStructure
    unstable_rates : array_like, shape (l, band_count)
        ``unstable_rates[i, j] > 1`` is the expansion of band ``j`` on symbol ``i``.
    stable_rates : array_like, shape (l,)
        Contraction rates in ``(0, 1)``.
    """

    subshift: SubshiftOfFiniteType
    bands: BandStructure
    unstable_rates: np.ndarray
    stable_rates: np.ndarray
    log_rates: np.ndarray = field(init=False, repr=False)
    log_stable: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        S = _as_subshift(self.subshift)
        object.__setattr__(self, "subshift", S)
        if not isinstance(self.bands, BandStructure):
            object.__setattr__(self, "bands", BandStructure(tuple(self.bands)))
        lam = np.asarray(self.unstable_rates, dtype=float)
        if lam.ndim == 1:
            lam = lam[:, None]
        shape = (S.alphabet_size, self.bands.band_count)
        if lam.shape != shape:
            raise ModelError(f"unstable rates must have shape {shape}, got {lam.shape}",
                             "unstable_rates")
        for (i, j), v in np.ndenumerate(lam):
            if not (np.isfinite(v) and v > 1):
                raise ModelError(f"expansion rate {v} must exceed 1", f"unstable_rates[{i}][{j}]")
        for j in range(shape[1] - 1):
            if lam[:, j + 1].max() >= lam[:, j].min():
                raise ModelError(
                    f"band {j + 1} rate {lam[:, j + 1].max()} is not dominated by "
                    f"band {j} rate {lam[:, j].min()}", f"unstable_rates[*][{j + 1}]")
        c = _check_stable(self.stable_rates, S.alphabet_size)
        for arr in (lam, c):
            arr.setflags(write=False)
        object.__setattr__(self, "unstable_rates", lam)
        object.__setattr__(self, "stable_rates", c)
        object.__setattr__(self, "log_rates", np.log(lam))
        object.__setattr__(self, "log_stable", np.log(c))

    @property
    def unstable_dim(self):
        return self.bands.unstable_dim

    @property
    def alphabet_size(self):
        return self.subshift.alphabet_size

    def symbol_matrix(self, i):
        """Diagonal expansion matrix of symbol ``i`` on the unstable space."""
        return np.diag(self.unstable_rates[i, self.bands.coordinate_band()])

    def with_subshift(self, subshift):
        return DiagonalHorseshoeModel(subshift, self.bands, self.unstable_rates, self.stable_rates)


@dataclass(frozen=True, eq=False)
class CocycleHorseshoeModel:
    """Per-symbol, per-band invertible matrices plus a stable contraction.

    ``band_matrices[j]`` is an array of shape ``(l, m_j, m_j)``.
    """

    subshift: SubshiftOfFiniteType
    bands: BandStructure
    band_matrices: tuple
    stable_rates: np.ndarray
    log_stable: np.ndarray = field(init=False, repr=False)

    MAX_BAND_DIM = 3

    def __post_init__(self):
        S = _as_subshift(self.subshift)
        object.__setattr__(self, "subshift", S)
        if not isinstance(self.bands, BandStructure):
            object.__setattr__(self, "bands", BandStructure(tuple(self.bands)))
        mats = []
        if len(self.band_matrices) != self.bands.band_count:
            raise ModelError("one matrix stack per band is required", "band_matrices")
        lo_prev = None
        for j, (B, mj) in enumerate(zip(self.band_matrices, self.bands.multiplicities)):
            B = np.array(B, dtype=float)
            if mj > self.MAX_BAND_DIM:
                raise ModelError(f"band dimension {mj} exceeds {self.MAX_BAND_DIM}", f"bands[{j}]")
            if B.shape != (S.alphabet_size, mj, mj):
                raise ModelError(f"expected shape {(S.alphabet_size, mj, mj)}, got {B.shape}",
                                 f"band_matrices[{j}]")
            sv = np.linalg.svd(B, compute_uv=False)
            if not np.all(np.isfinite(sv)) or sv[:, -1].min() <= 0:
                raise ModelError("matrices must be invertible", f"band_matrices[{j}]")
            if lo_prev is not None and sv[:, 0].max() >= lo_prev:
                raise ModelError(
                    f"largest singular value {sv[:, 0].max():.6g} of band {j} is not below the "
                    f"smallest singular value {lo_prev:.6g} of band {j - 1}", f"band_matrices[{j}]")
            lo_prev = sv[:, -1].min()
            B.setflags(write=False)
            mats.append(B)
        if lo_prev <= 1:
            raise ModelError("weakest band must expand (smallest singular value > 1)",
                             f"band_matrices[{len(mats) - 1}]")
        object.__setattr__(self, "band_matrices", tuple(mats))
        c = _check_stable(self.stable_rates, S.alphabet_size)
        c.setflags(write=False)
        object.__setattr__(self, "stable_rates", c)
        object.__setattr__(self, "log_stable", np.log(c))

    @property
    def unstable_dim(self):
        return self.bands.unstable_dim

    @property
    def alphabet_size(self):
        return self.subshift.alphabet_size

    def symbol_matrix(self, i):
        """Block-diagonal expansion matrix of symbol ``i``."""
        u = self.unstable_dim
        out = np.zeros((u, u))
        r = self.bands.partial_sums
        for j, B in enumerate(self.band_matrices):
            out[r[j]:r[j + 1], r[j]:r[j + 1]] = B[i]
        return out

    def with_subshift(self, subshift):
        return CocycleHorseshoeModel(subshift, self.bands, self.band_matrices, self.stable_rates)


def _word_rows(words):
    w = np.asarray(words, dtype=np.int64)
    if w.ndim == 1:
        w = w[None, :]
    if w.shape[1] == 0:
        raise ValueError("words must be nonempty")
    return w


def band_singular_logs(model, words, band):
    """Log norm and log conorm of the ordered band product for each word.

    Parameters
    ----------
    model : DiagonalHorseshoeModel or CocycleHorseshoeModel
    words : array_like of int, shape (count, n) or (n,)
    band : int

    Returns
    -------
    log_norm, log_conorm : ndarray, shape (count,)
    """
    w = _word_rows(words)
    if isinstance(model, DiagonalHorseshoeModel):
        s = model.log_rates[w, band].sum(axis=1)
        return s, s
    B = model.band_matrices[band]
    m = B.shape[1]
    P = np.broadcast_to(np.eye(m), (w.shape[0], m, m)).copy()
    log_scale = np.zeros(w.shape[0])
    for t in range(w.shape[1]):
        P = B[w[:, t]] @ P
        scale = np.abs(P).max(axis=(1, 2))
        P /= scale[:, None, None]
        log_scale += np.log(scale)
    sv = np.linalg.svd(P, compute_uv=False)
    return log_scale + np.log(sv[:, 0]), log_scale + np.log(sv[:, -1])


def band_log_norms(model, words):
    """Matrix ``(count, band_count)`` of log band norms."""
    return np.column_stack([band_singular_logs(model, words, j)[0]
                            for j in range(model.bands.band_count)])


def band_log_conorms(model, words):
    """Matrix ``(count, band_count)`` of log band conorms."""
    return np.column_stack([band_singular_logs(model, words, j)[1]
                            for j in range(model.bands.band_count)])


def band_norm(model, word, band):
    """Operator norm of the band product along ``word``."""
    return float(np.exp(band_singular_logs(model, word, band)[0][0]))


def band_conorm(model, word, band):
    """Smallest singular value of the band product along ``word``."""
    return float(np.exp(band_singular_logs(model, word, band)[1][0]))


def stable_logs(model, words):
    """Log of the stable contraction along each word (vectorised)."""
    return model.log_stable[_word_rows(words)].sum(axis=1)


def stable_log(model, word):
    """Log of the stable contraction along ``word``; always negative."""
    return float(stable_logs(model, word)[0])


# ---------------------------------------------------------------------------
# geometric realization


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``[lower, upper]`` in ``R^(u+1)``; last axis is stable."""

    lower: np.ndarray
    upper: np.ndarray

    @property
    def sides(self):
        return self.upper - self.lower

    def contains(self, other, tol=1e-12):
        return bool(np.all(other.lower >= self.lower - tol) and np.all(other.upper <= self.upper + tol))


@dataclass(frozen=True)
class CylinderBoxes:
    """Inner and outer boxes of a realized cylinder (equal for diagonal models)."""

    inner: Box
    outer: Box


def _default_offsets(widths):
    # symbols side by side along one axis with equal gaps, first at 0 and last flush at 1
    k = len(widths)
    if k == 1:
        return np.zeros(1)
    return np.array([i / (k - 1) * (1.0 - widths[i]) for i in range(k)])


def _interiors_overlap(lo1, hi1, lo2, hi2, tol=1e-12):
    return bool(np.all(np.minimum(hi1, hi2) - np.maximum(lo1, lo2) > tol))


@dataclass(frozen=True, eq=False)
class GeometricRealization:
    """Affine realization of a model inside the unit cube of ``R^(u+1)``.

    Symbol ``i`` owns the rectangle ``g_i([0,1]^u) x [0,1]`` where
    ``g_i(x) = unstable_offsets[i] + L_i^{-1} x`` and ``L_i`` is the symbol's
    expansion.  The stable factor of the image of rectangle ``i`` is
    ``stable_offsets[i] + c_i [0,1]``.  Points are coded by their future
    (unstable coordinate) and past (stable coordinate).

    Parameters
    ----------
    model : DiagonalHorseshoeModel or CocycleHorseshoeModel
    unstable_offsets : array_like, shape (l, u), optional
        Defaults to symbols spread along the first unstable axis.
    stable_offsets : array_like, shape (l,), optional
        Defaults to symbols spread along the stable axis.
    gamma_outer, gamma_inner : float
        Euclidean balls of radius ``r`` sit inside the product of coordinate
        balls of radius ``r`` and contain the product of radius ``r/sqrt(2)``
        ones; ``gamma_outer = sqrt(2)`` and ``gamma_inner = 1/sqrt(2)``
        express that comparison.
    """

    model: object
    unstable_offsets: np.ndarray = None
    stable_offsets: np.ndarray = None
    gamma_outer: float = float(np.sqrt(2.0))
    gamma_inner: float = float(1 / np.sqrt(2.0))
    inverse_maps: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        model = self.model
        l, u = model.alphabet_size, model.unstable_dim
        inv = np.array([np.linalg.inv(model.symbol_matrix(i)) for i in range(l)])
        object.__setattr__(self, "inverse_maps", inv)
        extents = np.abs(inv).sum(axis=2)  # bounding-box sides of g_i(cube)
        if self.unstable_offsets is None:
            o = np.zeros((l, u))
            o[:, 0] = _default_offsets(extents[:, 0])
        else:
            o = np.array(self.unstable_offsets, dtype=float).reshape(l, u)
        # bounding box of g_i(cube) in absolute coordinates
        neg = np.minimum(inv, 0).sum(axis=2)
        lo = o + neg
        hi = lo + extents
        for i in range(l):
            if np.any(lo[i] < -1e-12) or np.any(hi[i] > 1 + 1e-12):
                raise ModelError("rectangle leaves the unit cube", f"placement.unstable[{i}]")
        c = model.stable_rates
        if self.stable_offsets is None:
            so = _default_offsets(c)
        else:
            so = np.array(self.stable_offsets, dtype=float).reshape(l)
        for i in range(l):
            if so[i] < -1e-12 or so[i] + c[i] > 1 + 1e-12:
                raise ModelError("stable image leaves [0, 1]", f"placement.stable[{i}]")
        for i in range(l):
            for k in range(i + 1, l):
                if _interiors_overlap(lo[i], hi[i], lo[k], hi[k]):
                    raise ModelError(f"rectangles of symbols {i} and {k} overlap",
                                     f"placement.unstable[{k}]")
                if _interiors_overlap(so[i:i + 1], so[i:i + 1] + c[i], so[k:k + 1], so[k:k + 1] + c[k]):
                    raise ModelError(f"stable images of symbols {i} and {k} overlap",
                                     f"placement.stable[{k}]")
        o.setflags(write=False)
        so.setflags(write=False)
        object.__setattr__(self, "unstable_offsets", o)
        object.__setattr__(self, "stable_offsets", so)

    @property
    def dim(self):
        return self.model.unstable_dim + 1

    def unstable_affine(self, words):
        """Offset and linear part of ``g_{w_0} o ... o g_{w_{n-1}}`` for each word."""
        w = _word_rows(words)
        u = self.model.unstable_dim
        off = np.zeros((w.shape[0], u))
        lin = np.broadcast_to(np.eye(u), (w.shape[0], u, u)).copy()
        for t in range(w.shape[1]):
            off = off + np.einsum("kab,kb->ka", lin, self.unstable_offsets[w[:, t]])
            lin = lin @ self.inverse_maps[w[:, t]]
        return off, lin

    def stable_affine(self, words):
        """Offset and scale of the stable interval after following each word.

        The stable map of symbol ``i`` is ``y -> stable_offsets[i] + c_i y`` and
        the maps are applied in the order the word is read.
        """
        w = _word_rows(words)
        off = np.zeros(w.shape[0])
        scale = np.ones(w.shape[0])
        c, so = self.model.stable_rates, self.stable_offsets
        for t in range(w.shape[1]):
            off = so[w[:, t]] + c[w[:, t]] * off
            scale = c[w[:, t]] * scale
        return off, scale

    def unstable_boxes(self, words):
        """Bounding boxes ``(lower, upper)`` of the unstable cylinders."""
        off, lin = self.unstable_affine(words)
        lower = off + np.minimum(lin, 0).sum(axis=2)
        upper = lower + np.abs(lin).sum(axis=2)
        return lower, upper

    def unstable_centres(self, words):
        off, lin = self.unstable_affine(words)
        return off + 0.5 * lin.sum(axis=2)

    def stable_centres(self, words):
        off, scale = self.stable_affine(words)
        return off + 0.5 * scale


def realize_cylinder(realization, word):
    """Boxes of the cylinder of ``word``.

    The unstable factor is the image of the unit cube under the composed
    inverse branches along ``word``; the stable factor is the image of
    ``[0, 1]`` under the stable maps along ``word``.  For diagonal models
    the inner and outer boxes coincide and the unstable sides are exactly
    ``1 / band_norm``.  For cocycle models the outer box is the bounding box
    of the image parallelepiped and the inner box is a cube, per band,
    inscribed in it, of side ``1 / (band_norm * sqrt(m_j))``.
    """
    model = realization.model
    w = _word_rows(word)
    lower, upper = realization.unstable_boxes(w)
    s_off, s_scale = realization.stable_affine(w)
    outer = Box(np.append(lower[0], s_off[0]), np.append(upper[0], s_off[0] + s_scale[0]))
    if isinstance(model, DiagonalHorseshoeModel):
        return CylinderBoxes(outer, outer)
    centre = 0.5 * (lower[0] + upper[0])
    mult = np.asarray(model.bands.multiplicities)
    log_norms = band_log_norms(model, w)[0]
    half = 0.5 * np.repeat(np.exp(-log_norms) / np.sqrt(mult), mult)
    inner = Box(np.append(centre - half, s_off[0]), np.append(centre + half, s_off[0] + s_scale[0]))
    return CylinderBoxes(inner, outer)
