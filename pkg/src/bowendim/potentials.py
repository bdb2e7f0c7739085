"""Potentials on words: singular-value families and locally constant tables.

All values are logarithms (nats).  Singular-value families interpolate
between band log-norms: the norm family charges the strongest bands first,
the conorm family charges the weakest bands first, and the stable family is
a multiple of the stable log-contraction.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError, ResourceError
from .models import band_log_conorms, band_log_norms, stable_logs
from .symbolic import DEFAULT_WORD_CAP, word_array

KINDS = ("psi", "psihat", "phi")


def _interpolation_weights(multiplicities, s):
    """Weight of each band when ``s`` directions are charged in band order.

    For ``r_d <= s < r_{d+1}`` bands before ``d`` get full multiplicity and
    band ``d`` gets ``s - r_d``.  At ``s = u`` every band is full.
    """
    m = np.asarray(multiplicities, dtype=float)
    r = np.concatenate([[0.0], np.cumsum(m)])
    u = r[-1]
    if not 0 <= s <= u:
        raise ModelError(f"parameter {s} outside [0, {u:g}]", "parameter")
    weights = np.zeros(len(m))
    if s == u:
        return m.copy()
    d = int(np.searchsorted(r, s, side="right") - 1)
    weights[:d] = m[:d]
    weights[d] = s - r[d]
    return weights


def unstable_weights(bands, s):
    """Band weights for the norm family at parameter ``s``."""
    return _interpolation_weights(bands.multiplicities, s)


def conorm_weights(bands, t):
    """Band weights for the conorm family: bands are charged weakest first."""
    return _interpolation_weights(bands.multiplicities[::-1], t)[::-1]


def psi_values(model, words, s):
    """Norm family evaluated on each row of ``words``."""
    return band_log_norms(model, words) @ unstable_weights(model.bands, s)


def psi_hat_values(model, words, t):
    """Conorm family evaluated on each row of ``words``."""
    return band_log_conorms(model, words) @ conorm_weights(model.bands, t)


def phi_values(model, words, t_prime):
    if not 0 <= t_prime <= 1:
        raise ModelError(f"stable parameter {t_prime} outside [0, 1]", "parameter")
    return t_prime * stable_logs(model, words)


def psi(model, word, s):
    """Interpolated sum of band log-norms along ``word`` charging ``s`` directions."""
    return float(psi_values(model, word, s)[0])


def psi_hat(model, word, t):
    """Interpolated sum of band log-conorms, weakest band charged first."""
    return float(psi_hat_values(model, word, t)[0])


def phi(model, word, t_prime):
    """``t_prime`` times the stable log-contraction; nonpositive."""
    return float(phi_values(model, word, t_prime)[0])


@dataclass(frozen=True)
class SingularValueFamily:
    """One member of a singular-value potential family.

    Parameters
    ----------
    kind : {"psi", "psihat", "phi"}
    parameter : float
    model : horseshoe model
    horizon : int
        Word length the potential is evaluated on.
    """

    kind: str
    parameter: float
    model: object
    horizon: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ModelError(f"unknown family {self.kind!r}; expected one of {KINDS}", "kind")
        hi = 1.0 if self.kind == "phi" else self.model.unstable_dim
        if not 0 <= self.parameter <= hi:
            raise ModelError(f"parameter {self.parameter} outside [0, {hi:g}]", "parameter")
        if self.horizon < 1:
            raise ModelError("horizon must be >= 1", "horizon")

    def values(self, words):
        fn = {"psi": psi_values, "psihat": psi_hat_values, "phi": phi_values}[self.kind]
        return fn(self.model, words, self.parameter)


def _word_codes(words, base):
    w = np.asarray(words, dtype=np.int64)
    if w.ndim == 1:
        w = w[None, :]
    if w.shape[1] * np.log2(max(base, 2)) >= 62:
        raise ResourceError("word codes would overflow 64 bits", limit=62)
    codes = np.zeros(w.shape[0], dtype=np.int64)
    for t in range(w.shape[1]):
        codes = codes * base + w[:, t]
    return codes


@dataclass(frozen=True, eq=False)
class LocallyConstantPotential:
    """Potential depending on the first ``depth`` symbols.

    ``values[k]`` is the value on the ``k``-th admissible ``depth``-word in
    lexicographic order (the order of :func:`word_array`).
    """

    subshift: object
    depth: int
    values: np.ndarray
    words: np.ndarray = field(init=False, repr=False)
    codes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.depth < 1:
            raise ModelError("depth must be >= 1", "depth")
        words = word_array(self.subshift, self.depth)
        vals = np.asarray(self.values, dtype=float).ravel()
        if vals.shape[0] != words.shape[0]:
            raise ModelError(
                f"table has {vals.shape[0]} entries but there are {words.shape[0]} admissible "
                f"words of length {self.depth}", "values")
        if not np.all(np.isfinite(vals)):
            raise ModelError("potential values must be finite", "values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "codes", _word_codes(words, self.subshift.alphabet_size))

    @classmethod
    def zero(cls, subshift, depth=1):
        return cls(subshift, depth, np.zeros(word_array(subshift, depth).shape[0]))

    @classmethod
    def from_mapping(cls, subshift, depth, mapping):
        words = word_array(subshift, depth)
        vals = [mapping[tuple(int(a) for a in w)] for w in words]
        return cls(subshift, depth, np.array(vals))

    def index(self, windows):
        """Table row of each ``depth``-word in ``windows`` (rows of an array)."""
        codes = _word_codes(windows, self.subshift.alphabet_size)
        idx = np.searchsorted(self.codes, codes)
        idx = np.minimum(idx, len(self.codes) - 1)
        if not np.array_equal(self.codes[idx], codes):
            raise ModelError("word not admissible for this potential", "word")
        return idx

    def value(self, word):
        return float(self.values[self.index(np.asarray(word)[None, :])[0]])

    def birkhoff_sums(self, words):
        """Sum of the potential over every full window inside each word.

        A word of length ``n >= depth`` has ``n - depth + 1`` windows.
        """
        w = np.asarray(words, dtype=np.int64)
        if w.ndim == 1:
            w = w[None, :]
        n = w.shape[1]
        if n < self.depth:
            raise ValueError("word shorter than the potential depth")
        total = np.zeros(w.shape[0])
        for t in range(n - self.depth + 1):
            total += self.values[self.index(w[:, t:t + self.depth])]
        return total

    def shifted(self, constant):
        return LocallyConstantPotential(self.subshift, self.depth, self.values + constant)

    def scaled(self, factor):
        return LocallyConstantPotential(self.subshift, self.depth, self.values * factor)


def as_locally_constant(family, horizon=None, cap=DEFAULT_WORD_CAP):
    """Tabulate ``family`` on all admissible words of length ``horizon``."""
    N = family.horizon if horizon is None else horizon
    if N != family.horizon:
        raise ModelError(f"horizon {N} differs from the family horizon {family.horizon}", "horizon")
    S = family.model.subshift
    words = word_array(S, N, cap)
    return LocallyConstantPotential(S, N, family.values(words))
