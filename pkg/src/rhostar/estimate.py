"""Sample estimators of the dependence covariance and its components.

The plug-in (v) estimator averages the elementwise product of the two
marginal sample kernels over all index pairs; the u variant rescales
the centering terms by n/(n-1) and averages over distinct pairs only,
which trades the guaranteed sign for smaller bias.  Component
correlations decompose the plug-in estimate along the eigenfunctions
of the marginal empirical distributions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ._util import as_float_vector, stable_sum
from .dist import DiscreteDist, JointDist, empirical_dist
from .eigen import EigenSystem, eigensystem_dense
from .kernel import sample_kernel

__all__ = [
    "PairedSample",
    "DependenceReport",
    "Component",
    "DegenerateMarginError",
    "DegenerateMarginWarning",
    "expand_counts",
    "empirical_joint",
    "estimate_kappa",
    "rho_star",
    "component_correlations",
    "dependence_report",
    "reconstruct_table",
]


class DegenerateMarginError(ValueError):
    """A computation that needs a nonconstant margin got a constant one."""


class DegenerateMarginWarning(UserWarning):
    """A margin is constant; the requested estimate is trivially zero."""


@dataclass(frozen=True)
class PairedSample:
    """Paired observations, optionally with categorical margin labels.

    When a margin is categorical its values are ordinal scores
    1..number of categories and the labels name the categories in
    score order.  Estimators require at least 2 pairs.
    """

    x: np.ndarray
    y: np.ndarray
    x_labels: tuple[str, ...] | None = None
    y_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        x = as_float_vector(self.x, "x")
        y = as_float_vector(self.y, "y")
        if x.size != y.size:
            raise ValueError("x and y must have equal length")
        if x.size == 0:
            raise ValueError("sample must be nonempty")
        for values, labels, name in ((x, self.x_labels, "x"), (y, self.y_labels, "y")):
            if labels is None:
                continue
            scores = np.arange(1, len(labels) + 1)
            if not np.isin(values, scores).all():
                raise ValueError(f"categorical {name} values must be scores 1..{len(labels)}")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if self.x_labels is not None:
            object.__setattr__(self, "x_labels", tuple(str(s) for s in self.x_labels))
        if self.y_labels is not None:
            object.__setattr__(self, "y_labels", tuple(str(s) for s in self.y_labels))

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def categorical(self) -> bool:
        return self.x_labels is not None and self.y_labels is not None

    def swap(self) -> "PairedSample":
        return PairedSample(self.y, self.x, self.y_labels, self.x_labels)


@dataclass(frozen=True)
class Component:
    """One term of the eigen-decomposition of the dependence estimate.

    k, l are 1-based component indices; lam and mu are the k-th and
    l-th eigenvalues of the x and y margins; rho is the sample
    correlation of the corresponding eigenfunction values.
    """

    k: int
    l: int
    lam: float
    mu: float
    rho: float


@dataclass(frozen=True)
class DependenceReport:
    """Full decomposition of the dependence between two margins."""

    kappa_v: float
    kappa_u: float
    rho_star_v: float
    rho_star_u: float
    components: tuple[Component, ...]
    eigen_x: EigenSystem = field(repr=False)
    eigen_y: EigenSystem = field(repr=False)


def expand_counts(counts, x_labels=None, y_labels=None) -> PairedSample:
    """Expand an I x J count table into pairs of ordinal scores.

    Cell (a, b) contributes counts[a, b] copies of the pair
    (a + 1, b + 1), emitted in row-major order.
    """
    counts = np.asarray(counts)
    if counts.ndim != 2:
        raise ValueError("counts must be a matrix")
    if np.any(counts < 0) or not np.issubdtype(counts.dtype, np.integer):
        if not np.all(counts == np.floor(counts)) or np.any(counts < 0):
            raise ValueError("counts must be nonnegative integers")
    counts = counts.astype(np.int64)
    i_idx, j_idx = np.nonzero(counts)
    reps = counts[i_idx, j_idx]
    x = np.repeat(i_idx + 1.0, reps)
    y = np.repeat(j_idx + 1.0, reps)
    if x_labels is None:
        x_labels = tuple(str(a + 1) for a in range(counts.shape[0]))
    if y_labels is None:
        y_labels = tuple(str(b + 1) for b in range(counts.shape[1]))
    return PairedSample(x, y, tuple(x_labels), tuple(y_labels))


def empirical_joint(s: PairedSample) -> JointDist:
    """Empirical joint distribution of a sample, ties merged per margin."""
    xs, ix = np.unique(s.x, return_inverse=True)
    ys, iy = np.unique(s.y, return_inverse=True)
    cells = np.bincount(ix * ys.size + iy, minlength=xs.size * ys.size)
    probs = cells.reshape(xs.size, ys.size) / s.n
    return JointDist(xs, ys, probs)


def _is_constant(values: np.ndarray) -> bool:
    return bool(np.all(values == values[0]))


def estimate_kappa(s: PairedSample, mode: str = "v") -> float:
    """Dependence covariance estimate from the paired sample.

    mode "v" is the plug-in estimator (nonnegative); mode "u"
    averages over distinct pairs of the rescaled kernels and can go
    below zero.  A constant margin makes the estimate identically
    zero; this is reported with a DegenerateMarginWarning rather than
    an error so that scans over many pairs of variables keep going.
    """
    if mode not in ("v", "u"):
        raise ValueError(f"unknown mode {mode!r}")
    if s.n < 2:
        raise ValueError("need at least 2 pairs")
    if _is_constant(s.x) or _is_constant(s.y):
        warnings.warn("constant margin: kappa estimate is 0 by construction",
                      DegenerateMarginWarning, stacklevel=2)
        return 0.0
    centering = "v_centered" if mode == "v" else "u_centered"
    h1 = sample_kernel(s.x, centering).matrix
    h2 = sample_kernel(s.y, centering).matrix
    n = s.n
    if mode == "v":
        return float(stable_sum(h1 * h2)) / (n * n)
    iu = np.triu_indices(n, k=1)
    return 2.0 * float(stable_sum(h1[iu] * h2[iu])) / (n * (n - 1.0))


def rho_star(s: PairedSample, mode: str = "v") -> float:
    """Normalized dependence estimate, kappa(X,Y)/sqrt(kappa(X,X)kappa(Y,Y)).

    The v version lies in [0, 1] up to round-off and is clamped only
    within 1e-10 of the boundary; the u version may be negative.  The
    denominator terms reuse the generic kappa path with both margins
    set to the same values.
    """
    if _is_constant(s.x) or _is_constant(s.y):
        raise DegenerateMarginError("rho_star undefined for constant margin")
    kxy = estimate_kappa(s, mode)
    kxx = estimate_kappa(PairedSample(s.x, s.x), mode)
    kyy = estimate_kappa(PairedSample(s.y, s.y), mode)
    out = kxy / np.sqrt(kxx * kyy)
    if mode == "v":
        if -1e-10 < out < 0.0:
            out = 0.0
        elif 1.0 < out < 1.0 + 1e-10:
            out = 1.0
    return float(out)


def _margin_eigensystem(values: np.ndarray) -> tuple[EigenSystem, np.ndarray]:
    """Eigensystem of a margin's empirical distribution and the map
    from observations to support indices."""
    dist = empirical_dist(values)
    if dist.size < 2:
        raise DegenerateMarginError("constant margin has no eigensystem")
    return eigensystem_dense(dist), np.searchsorted(dist.support, values)


def _cell_table(s: PairedSample, ix: np.ndarray, iy: np.ndarray,
                nx: int, ny: int) -> np.ndarray:
    counts = np.bincount(ix * ny + iy, minlength=nx * ny)
    return counts.reshape(nx, ny) / s.n


def component_correlations(s: PairedSample, max_k: int | None = None,
                           max_l: int | None = None) -> tuple[Component, ...]:
    """Correlations of marginal eigenfunction values, all (k, l) pairs.

    The empirical eigensystems are built on the tied-value atoms of
    each margin, and the correlations are accumulated through the
    joint cell table, so any reordering of the observations gives
    bit-identical results.  By default every positive eigenvalue is
    used, which makes sum lam_k mu_l rho_kl^2 reproduce the plug-in
    kappa estimate.
    """
    ex, ix = _margin_eigensystem(s.x)
    ey, iy = _margin_eigensystem(s.y)
    table = _cell_table(s, ix, iy, ex.dist.size, ey.dist.size)
    rho = ex.functions @ table @ ey.functions.T

    def clip(requested, available, axis):
        if requested is None:
            return available
        requested = int(requested)
        if requested < 1:
            raise ValueError(f"max_{axis} must be at least 1")
        if requested > available:
            warnings.warn(f"only {available} {axis}-components available; truncating",
                          UserWarning, stacklevel=3)
            return available
        return requested

    mk = clip(max_k, rho.shape[0], "k")
    ml = clip(max_l, rho.shape[1], "l")
    return tuple(
        Component(k + 1, l + 1, float(ex.eigenvalues[k]), float(ey.eigenvalues[l]),
                  float(rho[k, l]))
        for k in range(mk) for l in range(ml))


def dependence_report(s: PairedSample, max_k: int | None = None,
                      max_l: int | None = None) -> DependenceReport:
    """Both kappa estimates, both normalizations and all components."""
    ex, _ = _margin_eigensystem(s.x)
    ey, _ = _margin_eigensystem(s.y)
    return DependenceReport(
        kappa_v=estimate_kappa(s, "v"),
        kappa_u=estimate_kappa(s, "u"),
        rho_star_v=rho_star(s, "v"),
        rho_star_u=rho_star(s, "u"),
        components=component_correlations(s, max_k, max_l),
        eigen_x=ex,
        eigen_y=ey,
    )


@dataclass(frozen=True)
class ReconstructedTable:
    """Probability table rebuilt from marginal spectra and correlations.

    is_distribution is False when truncating the component list has
    produced cells below -1e-9; such a table is not a distribution.
    """

    probs: np.ndarray
    is_distribution: bool


def reconstruct_table(marg1: DiscreteDist, marg2: DiscreteDist,
                      components) -> ReconstructedTable:
    """Joint table p_a q_b (1 + sum_kl rho_kl g_1k(a) g_2l(b)).

    components is an iterable of Component or (k, l, rho) triples
    with 1-based indices.  With the full component set of an observed
    table this reproduces the observed cells; truncated sets give the
    closest low-order summary, which may leave slightly negative
    cells.
    """
    ex = eigensystem_dense(marg1)
    ey = eigensystem_dense(marg2)
    density = np.ones((marg1.size, marg2.size))
    for comp in components:
        if isinstance(comp, Component):
            k, l, rho = comp.k, comp.l, comp.rho
        else:
            k, l, rho = comp
        if not 1 <= k <= ex.count or not 1 <= l <= ey.count:
            raise ValueError(f"component ({k}, {l}) is outside the available spectra")
        density += rho * np.outer(ex.functions[k - 1], ey.functions[l - 1])
    probs = marg1.probs[:, np.newaxis] * marg2.probs[np.newaxis, :] * density
    return ReconstructedTable(probs, bool(probs.min() >= -1e-9))
