"""Roots of Bowen's equation for the singular-value families.

Pressure of ``-psi^s`` (or ``-psihat^t``) is continuous and strictly
decreasing in the parameter because every band expands, and pressure of the
stable family is strictly decreasing because the stable logs are negative.
Roots are found by bisection, which copes with the kinks at the band
boundaries.  Every solve keeps its full bisection trace.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ModelError
from .gibbs import entropy, equilibrium_measure, lyapunov_exponents
from .potentials import LocallyConstantPotential, psi_values
from .pressure import BlockSystem, block_system
from .symbolic import DEFAULT_WORD_CAP, word_array

TOL = 1e-10
MAX_ITER = 200


@dataclass(frozen=True)
class RootResult:
    """Outcome of one root solve.

    ``status`` is ``"exact"`` when the pressure at the returned parameter is
    within ``tol`` of zero and ``"clamped"`` when pressure stays positive on
    the whole admissible range, in which case the upper end is returned.
    """

    root: float
    bracket: tuple
    residual: float
    iterations: int
    status: str
    family: str
    level: int
    trace: tuple = ()

    @property
    def clamped(self):
        return self.status == "clamped"


def bisect_decreasing(fn, lo, hi, tol=TOL, max_iter=MAX_ITER):
    """Zero of a continuous decreasing function on ``[lo, hi]``.

    Returns ``(root, bracket, value, iterations, status, trace)``.
    """
    f_lo, f_hi = fn(lo), fn(hi)
    trace = [(lo, f_lo), (hi, f_hi)]
    if f_hi > tol:
        return hi, (hi, hi), f_hi, 0, "clamped", tuple(trace)
    if abs(f_lo) <= tol:
        return lo, (lo, lo), f_lo, 0, "exact", tuple(trace)
    if f_lo < 0:
        raise ModelError(f"pressure {f_lo:.3g} is already negative at the lower end", "parameter")
    if abs(f_hi) <= tol:
        return hi, (hi, hi), f_hi, 0, "exact", tuple(trace)
    mid, f_mid = lo, f_lo
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        trace.append((mid, f_mid))
        if f_mid > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol and abs(f_mid) <= tol:
            break
    status = "exact" if abs(f_mid) <= tol else "unconverged"
    return mid, (lo, hi), f_mid, it, status, tuple(trace)


def _check_level(N):
    if N < 1 or N & (N - 1):
        raise ValueError(f"level {N} is not a power of two")


def root_on_blocks(system, kind, tol=TOL, level=None):
    """Bowen root of ``kind`` on an explicit block system."""
    if kind == "phi":
        fn = lambda t: system.pressure("phi", t, sign=1.0)
        hi = 1.0
    elif kind in ("psi", "psihat"):
        fn = lambda s: system.pressure(kind, s, sign=-1.0)
        hi = float(system.model.unstable_dim)
    else:
        raise ModelError(f"unknown family {kind!r}", "family")
    root, bracket, value, its, status, trace = bisect_decreasing(fn, 0.0, hi, tol)
    return RootResult(float(root), bracket, float(value), its, status, kind,
                      system.length if level is None else level, trace)


def bowen_root_unstable(model, level=1, kind="psi", tol=TOL, cap=DEFAULT_WORD_CAP):
    """Root of ``s -> (1/N) P(f^N, -family_s)`` on ``[0, u]`` with ``N = level``."""
    _check_level(level)
    if kind not in ("psi", "psihat"):
        raise ModelError(f"unstable family must be psi or psihat, got {kind!r}", "family")
    return root_on_blocks(block_system(model, level, cap), kind, tol, level)


def bowen_root_stable(model, level=1, tol=TOL, cap=DEFAULT_WORD_CAP):
    """Root of ``t -> (1/N) P(f^N, t * stable_log)`` on ``[0, 1]``."""
    _check_level(level)
    return root_on_blocks(block_system(model, level, cap), "phi", tol, level)


@dataclass(frozen=True)
class RootSequence:
    results: tuple
    nondecreasing: bool
    worst_violation: float

    @property
    def roots(self):
        return np.array([r.root for r in self.results])

    @property
    def limit(self):
        return self.results[-1].root


def root_sequence(model, kind="psi", max_level=3, tol=TOL, cap=DEFAULT_WORD_CAP):
    """Roots at levels ``1, 2, 4, ..., 2^max_level``.

    For the norm family the roots are nondecreasing in the level; the
    largest decrease seen is reported as ``worst_violation``.
    """
    results = []
    for k in range(max_level + 1):
        N = 2 ** k
        if kind == "phi":
            results.append(bowen_root_stable(model, N, tol, cap))
        else:
            results.append(bowen_root_unstable(model, N, kind, tol, cap))
    roots = np.array([r.root for r in results])
    drops = -np.diff(roots) if len(roots) > 1 else np.zeros(1)
    worst = float(max(drops.max(), 0.0))
    return RootSequence(tuple(results), worst <= tol, worst)


def _base_potential(model, values):
    return LocallyConstantPotential(model.subshift, 1, values)


def stable_root_identity_check(model, level=1, tol=TOL):
    """``|t' - h_nu / (-lambda_s(nu))|`` at the stable root ``t'``.

    ``nu`` is the equilibrium state of ``t' * stable_log``.  When the entropy
    vanishes the ratio is taken as zero.
    """
    res = bowen_root_stable(model, level, tol)
    words = word_array(model.subshift, 1)
    nu = equilibrium_measure(model.subshift,
                             _base_potential(model, res.root * model.log_stable[words[:, 0]]))
    h = entropy(nu)
    lam = lyapunov_exponents(nu, model).stable
    ratio = h / -lam if h > 0 else 0.0
    return float(abs(res.root - ratio))


@dataclass(frozen=True)
class RootBoundCheck:
    root: float
    bound: float
    entropy: float
    exponents: np.ndarray
    holds: bool


def root_lower_bound_check(model, root, level=1, tol=1e-6):
    """Check ``s >= (h - sum_{j<last} m_j l_j + r_{last-1} l_last) / l_last``.

    Entropy and exponents come from the equilibrium state of ``-psi^s`` on the
    base shift at the given root ``s``.  For cocycle models the exponents are
    the averaged log-norms over words of length ``level``, the horizon the
    root was computed at.
    """
    words = word_array(model.subshift, 1)
    mu = equilibrium_measure(model.subshift, _base_potential(model, -psi_values(model, words, root)))
    h = entropy(mu)
    lam = np.asarray(lyapunov_exponents(mu, model, n_max=level).bands)
    m = np.asarray(model.bands.multiplicities)
    r = model.bands.partial_sums
    bound = (h - m[:-1] @ lam[:-1] + r[-2] * lam[-1]) / lam[-1]
    return RootBoundCheck(float(root), float(bound), h, lam, bool(root >= bound - tol))
