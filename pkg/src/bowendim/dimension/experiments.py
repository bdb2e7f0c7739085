"""Dimension experiments built from roots, ball masses and box counts.

Hausdorff dimension is never computed directly.  Each experiment pairs a
bracket derived from Bowen roots with an independent numerical estimate
(ball-mass regressions or box counting) and reports both.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..bowen import TOL, bowen_root_stable, bowen_root_unstable, root_on_blocks
from ..errors import ModelError
from ..gibbs import (entropy, equilibrium_measure, lyapunov_exponents, pesin_check,
                     srb_measure)
from ..models import DiagonalHorseshoeModel
from ..potentials import LocallyConstantPotential
from ..pressure import BlockSystem
from ..symbolic import DEFAULT_WORD_CAP, power_subshift, word_array
from .balls import radius_grid, slice_slopes, stable_letters, unstable_letters
from .boxcount import box_counting
from .katok import katok_family

DEFAULT_EPS = 0.05
EPS_GRID = (0.1, 0.05, 0.02)

# Per-model regression settings: (k_min, k_max, box depth) for radii 2^-k.
# Slices with one unstable direction afford long grids; on two-dimensional
# slices the ball covers grow like r^-2, so the grids stop earlier.
GRIDS = {
    "ternary": (4, 14, 10),
    "golden-mean": (4, 14, 12),
    "asymmetric-stable": (4, 14, 10),
    "full-2-shift": (4, 14, 10),
    "diagonal-l2": (3, 7, 4),
    "srb-mixed": (3, 7, 4),
    "rotation-cocycle": (3, 8, 8),
}
DEFAULT_GRID = (4, 12, 10)


def grid_for(name):
    """``(radii, depth)`` registered for a bundled model name."""
    k_min, k_max, depth = GRIDS.get(name, DEFAULT_GRID)
    return radius_grid(k_min, k_max), depth


@dataclass(frozen=True, eq=False)
class ProductMeasure:
    """Unstable and stable equilibrium states at the level-``N`` roots.

    Both factors live on the ``N``-th power of the model's shift; their
    letters are the ``N``-words.
    """

    unstable: object
    stable: object
    level: int
    t: float
    t_prime: float


def level_measure(model, values_fn, N, cap=DEFAULT_WORD_CAP):
    """Equilibrium state on the ``N``-th power of a depth-one block potential."""
    SN = power_subshift(model.subshift, N, cap)
    words = np.array(SN.labels) if N > 1 else word_array(model.subshift, 1)
    return equilibrium_measure(SN, LocallyConstantPotential(SN, 1, values_fn(words)))


def product_measure(model, level=1, tol=TOL, cap=DEFAULT_WORD_CAP):
    """Product of the norm-family and stable equilibrium states at one level."""
    t = bowen_root_unstable(model, level, "psi", tol, cap).root
    tp = bowen_root_stable(model, level, tol, cap).root
    def unstable_values(words):
        return -BlockSystem.from_words(model, words).values("psi", t)
    def stable_values(words):
        return BlockSystem.from_words(model, words).values("phi", tp)
    return ProductMeasure(level_measure(model, unstable_values, level, cap),
                          level_measure(model, stable_values, level, cap), level, t, tp)


@dataclass(frozen=True)
class ProductSlopes:
    unstable: np.ndarray
    stable: np.ndarray

    @property
    def total(self):
        return self.unstable + self.stable


def product_slopes(realization, product, radii, count=4, seed=0):
    """Regression slopes of the product ball mass at typical points.

    The product mass is the unstable conditional mass times the stable one,
    so its log-log slope is the sum of the two slice slopes.
    """
    su = slice_slopes(unstable_letters(realization, product.unstable), radii, count, seed)
    ss = slice_slopes(stable_letters(realization, product.stable), radii, count, seed + 1)
    return ProductSlopes(su.slopes, ss.slopes)


@dataclass(frozen=True)
class BracketEntry:
    """One row of a dimension report.

    ``lower = t + t' - 2 eps`` and ``upper = u + t' + 2 eps``; ``tight_upper``
    replaces ``u`` by the conorm-family root ``t_hat``, which bounds the
    unstable local dimension from above.
    """

    level: int
    eps: float
    t: float
    t_hat: float
    t_prime: float
    lower: float
    upper: float
    tight_upper: float
    extra: dict = field(default_factory=dict)

    @property
    def width(self):
        return self.upper - self.lower

    def contains(self, value):
        return bool(self.lower <= value <= self.upper)


def bracket(u, t, t_hat, t_prime, eps, level=1, **extra):
    return BracketEntry(level, eps, t, t_hat, t_prime, t + t_prime - 2 * eps,
                        u + t_prime + 2 * eps, t_hat + t_prime + 2 * eps, dict(extra))


def product_bracket(realization, level=1, eps=DEFAULT_EPS, radii=None, count=4, seed=0,
                    tol=TOL):
    """Root bracket at one level plus empirical slopes of the product measure."""
    model = realization.model
    radii = radius_grid(4, 20) if radii is None else np.asarray(radii)
    prod = product_measure(model, level, tol)
    t_hat = bowen_root_unstable(model, level, "psihat", tol).root
    slopes = product_slopes(realization, prod, radii, count, seed)
    entry = bracket(model.unstable_dim, prod.t, t_hat, prod.t_prime, eps, level,
                    slopes=slopes.total)
    inside = bool(np.all((slopes.total >= entry.lower) & (slopes.total <= entry.upper)))
    entry.extra["slopes_inside"] = inside
    return entry


@dataclass(frozen=True)
class YoungCheck:
    empirical: float
    target: float
    residual: float
    slopes: np.ndarray


def young_target(model, mu):
    """``h/lambda_u + h/(-lambda_s)`` for a measure on a one-band model."""
    if model.bands.band_count != 1 or model.unstable_dim != 1:
        raise ModelError("the two-exponent formula needs one unstable direction", "bands")
    h = entropy(mu)
    lyap = lyapunov_exponents(mu, model)
    if h == 0:
        return 0.0
    return float(h / lyap.bands[0] + h / -lyap.stable)


def young_formula_check(realization, mu, radii=None, count=128, seed=0):
    """Compare product ball-mass slopes of ``mu`` with the exponent formula.

    The empirical dimension is the mean slope over ``count`` typical points;
    single-point slopes of a non-uniform measure scatter by about 0.15 at
    these radii, hence the large default sample.
    """
    model = realization.model
    target = young_target(model, mu)
    radii = radius_grid(4, 20) if radii is None else np.asarray(radii)
    su = slice_slopes(unstable_letters(realization, mu), radii, count, seed)
    ss = slice_slopes(stable_letters(realization, mu), radii, count, seed + 1)
    slopes = su.slopes + ss.slopes
    emp = float(slopes.mean())
    return YoungCheck(emp, target, abs(emp - target), slopes)


def moran_root(ratios, transitions=None):
    """Root ``t`` of ``spectral_radius(A diag(ratios^t)) = 1`` by Brent's method.

    For a full shift this is ``sum ratios^t = 1``.
    """
    c = np.asarray(ratios, dtype=float)
    if transitions is None:
        f = lambda t: np.log(np.sum(c ** t))
    else:
        A = np.asarray(transitions, dtype=float)
        f = lambda t: np.log(np.max(np.abs(np.linalg.eigvals(A * (c ** t)[None, :]))))
    if f(0.0) <= 0:
        return 0.0
    return float(brentq(f, 0.0, 1.0, xtol=1e-14, rtol=1e-14))


@dataclass(frozen=True)
class McmCheck:
    t_unstable: float
    t_stable: float
    oracle_unstable: float
    oracle_stable: float
    box_unstable: float
    box_stable: float

    @property
    def oracle_residual(self):
        return max(abs(self.t_unstable - self.oracle_unstable),
                   abs(self.t_stable - self.oracle_stable))

    @property
    def box_residual(self):
        return max(abs(self.t_unstable - self.box_unstable),
                   abs(self.t_stable - self.box_stable))


def mcm_roots_check(realization, depth=14, tol=TOL):
    """Unstable and stable roots against Moran oracles and box counts."""
    model = realization.model
    if not isinstance(model, DiagonalHorseshoeModel) or model.unstable_dim != 1:
        raise ModelError("needs a diagonal model with one unstable direction", "model")
    t_u = bowen_root_unstable(model, 1, "psi", tol).root
    t_s = bowen_root_stable(model, 1, tol).root
    A = None if model.subshift.is_full else model.subshift.transitions
    o_u = moran_root(1 / model.unstable_rates[:, 0], A)
    o_s = moran_root(model.stable_rates, A)
    b_u = box_counting(realization, "unstable", depth).estimate
    b_s = box_counting(realization, "stable", depth).estimate
    return McmCheck(t_u, t_s, o_u, o_s, b_u, b_s)


def measure_dimension_target(model, mu=None):
    """Unstable and stable dimensions of the measure and their sum.

    The stable part is ``h/(-lambda_s)``.  The unstable part is ``h/lambda_1``
    for one unstable direction and ``u`` when the measure satisfies the
    entropy formula; otherwise no closed form is available.
    """
    mu = srb_measure(model) if mu is None else mu
    h = entropy(mu)
    lyap = lyapunov_exponents(mu, model)
    dim_s = h / -lyap.stable if h > 0 else 0.0
    if model.unstable_dim == 1:
        dim_u = h / lyap.bands[0] if h > 0 else 0.0
    elif isinstance(model, DiagonalHorseshoeModel) and pesin_check(model) <= 1e-9:
        dim_u = float(model.unstable_dim)
    else:
        raise ModelError("unstable dimension has no closed form for this measure", "measure")
    return float(dim_u), float(dim_s), float(dim_u + dim_s)


@dataclass(frozen=True)
class DimensionReport:
    """Bracket rows and the target they should close in on."""

    rows: tuple
    target: float
    dim_unstable: float
    dim_stable: float
    box: dict = field(default_factory=dict)

    @property
    def final(self):
        return self.rows[-1]


def measure_dimension_experiment(model, mu=None, n_grid=(8, 10, 12), eps_grid=(0.1, 0.05),
                         cap=DEFAULT_WORD_CAP, tol=TOL, workers=1):
    """Brackets on typical-block families approaching the target measure.

    For each block length ``n`` and slack ``eps`` the family is built, the
    norm, conorm and stable roots are solved on it, and the bracket row is
    recorded.  Rows are ordered by decreasing ``eps`` then increasing ``n``,
    so the last row is the finest.  Grid cells are independent and may run
    on ``workers`` threads; the row order does not depend on it.
    """
    mu = srb_measure(model) if mu is None else mu
    dim_u, dim_s, target = measure_dimension_target(model, mu)

    def cell(job):
        eps, n = job
        fam = katok_family(model, mu, n, eps, cap)
        t = root_on_blocks(fam.system, "psi", tol).root
        t_hat = root_on_blocks(fam.system, "psihat", tol).root
        tp = root_on_blocks(fam.system, "phi", tol).root
        return bracket(model.unstable_dim, t, t_hat, tp, eps, n,
                       entropy=fam.entropy, retained=fam.retained_fraction,
                       blocks=fam.system.size, lumped=fam.lumped)

    jobs = [(eps, n) for eps in eps_grid for n in n_grid]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(cell, jobs))
    else:
        rows = [cell(job) for job in jobs]
    return DimensionReport(tuple(rows), target, dim_u, dim_s)


@dataclass(frozen=True)
class MassDistributionCheck:
    d_lower: float
    d_upper: float
    box: float
    lower_holds: bool
    upper_holds: bool


def mass_distribution_check(realization, mu, radii, depth, count=4, seed=0, tol=0.05):
    """Ball-mass exponents against the box count of the supporting slice.

    The smallest slope ``d_lower`` means ``mu(B) <= C r^d_lower`` at every
    sampled point, which forces dimension at least ``d_lower``; the largest
    slope gives the matching upper bound.
    """
    sample = slice_slopes(unstable_letters(realization, mu), radii, count, seed)
    box = box_counting(realization, "unstable", depth).estimate
    return MassDistributionCheck(sample.lower, sample.upper, box,
                                 box >= sample.lower - tol, box <= sample.upper + tol)
