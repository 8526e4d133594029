"""Rank/grade variants and ordered K-sample comparison statistics.

Grading maps each margin through K^{-1} of its own mid-rank CDF, so
any strictly increasing transform of the raw data leads to the same
graded sample.  All grade statistics reuse the plain estimators on
transformed data; there is no second estimation code path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._util import as_float_vector
from .dist import DiscreteDist, NamedDist, get_family, mid_cdf
from .estimate import DegenerateMarginError, PairedSample
from .kernel import population_kernel

__all__ = [
    "GradeScale",
    "KSampleData",
    "grade_scale",
    "grade_transform",
    "ksample_kappa",
    "phi_weight",
    "phi_at_cut",
]


@dataclass(frozen=True)
class GradeScale:
    """Target scale of a grade transform.

    Wraps one of the built-in continuous families; the uniform family
    gives plain grades (mid-ranks scaled to (0, 1)).
    """

    family: NamedDist

    def quantile(self, u):
        return self.family.quantile(u)

    @property
    def name(self) -> str:
        return self.family.name


def grade_scale(which: str | NamedDist | GradeScale) -> GradeScale:
    """Coerce a family name or NamedDist to a GradeScale."""
    if isinstance(which, GradeScale):
        return which
    if isinstance(which, NamedDist):
        return GradeScale(which)
    return GradeScale(get_family(which))


def grade_transform(s: PairedSample, k1="uniform", k2="uniform") -> PairedSample:
    """Transform both margins to grades on the chosen scales.

    Each value is replaced by K^{-1}(F_hat(value)) with F_hat the
    margin's own mid-rank CDF, so distinct values map to quantiles of
    (rank - 1/2)/n and ties to their mid-rank average.  Category
    labels do not survive the transform.
    """
    k1 = grade_scale(k1)
    k2 = grade_scale(k2)
    gx = k1.quantile(mid_cdf(s.x, s.x))
    gy = k2.quantile(mid_cdf(s.y, s.y))
    return PairedSample(gx, gy)


@dataclass(frozen=True)
class KSampleData:
    """K groups of real observations, each group carrying a score.

    Scores may repeat across groups (their atoms then merge) but must
    not all be equal.
    """

    scores: np.ndarray
    groups: tuple[np.ndarray, ...]

    def __post_init__(self):
        scores = as_float_vector(self.scores, "scores")
        groups = tuple(as_float_vector(g, "group") for g in self.groups)
        if scores.size != len(groups):
            raise ValueError("need exactly one score per group")
        if scores.size < 2:
            raise ValueError("need at least 2 groups")
        if np.all(scores == scores[0]):
            raise DegenerateMarginError("scores must not all be equal")
        if any(g.size == 0 for g in groups):
            raise ValueError("every group needs at least one observation")
        scores.setflags(write=False)
        for g in groups:
            g.setflags(write=False)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "groups", groups)

    @property
    def total(self) -> int:
        return int(sum(g.size for g in self.groups))


def ksample_kappa(d: KSampleData, grade=None) -> float:
    """Dependence covariance between group score and response.

    Computes sum_ij p_i p_j h(c_i, c_j) Int [G_i - F][G_j - F] dy with
    p the group proportions, G_k the group mid-rank CDFs and F the
    pooled CDF; all step functions are integrated exactly between
    consecutive pooled values.  When a grade scale is given the
    response axis is first mapped through K^{-1} of the pooled
    mid-rank CDF, which turns the weighted form of the integral into
    the plain one on transformed data.
    """
    total = float(d.total)
    pooled = np.sort(np.concatenate(d.groups))
    support = np.unique(pooled)
    if support.size < 2:
        return 0.0

    if grade is not None:
        levels = mid_cdf(pooled, support)
        axis = grade_scale(grade).quantile(levels)
    else:
        axis = support
    lengths = np.diff(axis)

    # right-continuous CDF of each group and of the pool on the open
    # intervals (support[s], support[s+1])
    pool_cdf = np.searchsorted(pooled, support, side="right")[:-1] / total
    dev = np.empty((len(d.groups), support.size - 1))
    for g, obs in enumerate(d.groups):
        group_cdf = np.searchsorted(np.sort(obs), support, side="right")[:-1] / obs.size
        dev[g] = group_cdf - pool_cdf
    overlap = dev @ (lengths[:, np.newaxis] * dev.T)

    weights = np.array([g.size for g in d.groups]) / total
    merged, idx = np.unique(d.scores, return_inverse=True)
    merged_w = np.bincount(idx, weights=weights)
    h = population_kernel(DiscreteDist(merged, merged_w)).matrix
    h_groups = h[np.ix_(idx, idx)]
    return float(np.einsum("i,ij,j->", weights, h_groups * overlap, weights))


def phi_weight(k, u):
    """Grade weight of scale K at probability u, raw and normalized.

    w(u) = u(1 - u)/density(K^{-1}(u)); dividing by the integral of w
    over (0, 1) (a known constant per family) gives the normalized
    weight whose mean is 1 on the logistic scale.
    """
    scale = grade_scale(k)
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0.0) | (u >= 1.0)):
        raise ValueError("u must lie in (0, 1)")
    w = u * (1.0 - u) / scale.family.pdf_at_quantile(u)
    wn = w / scale.family.half_gini
    if w.ndim == 0:
        return float(w), float(wn)
    return w, wn


def phi_at_cut(s: PairedSample, x: float, y: float) -> float:
    """Association of the 2x2 collapse of the sample at a cut point.

    |F12 - F1 F2| / sqrt(F1(1-F1) F2(1-F2)) with mid-rank empirical
    CDFs evaluated at (x, y).
    """
    from .dist import gamma_ind

    f1 = mid_cdf(s.x, x)
    f2 = mid_cdf(s.y, y)
    if not (0.0 < f1 < 1.0 and 0.0 < f2 < 1.0):
        raise ValueError("degenerate 2x2 collapse: cut outside the data range")
    f12 = float(np.mean(gamma_ind(s.x, x) * gamma_ind(s.y, y)))
    return abs(f12 - f1 * f2) / np.sqrt(f1 * (1.0 - f1) * f2 * (1.0 - f2))
