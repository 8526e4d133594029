"""The doubly centered distance kernel and its scalar diagnostics.

For a distribution F the kernel is

    h(z1, z2) = -1/2 E(|z1 - z2| - |z1 - Z2| - |Z1 - z2| + |Z1 - Z2|)

with Z1, Z2 iid from F.  On a finite support this is the double
centering of the pairwise distance matrix under the atom weights; on a
sample it is the same construction with weights 1/n (plain centering)
or n/(n-1)-scaled centering terms (the unbiased variant).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._util import as_float_vector, stable_sum
from .dist import DiscreteDist, JointDist

__all__ = [
    "CenteredKernel",
    "KernelDiagnostics",
    "population_kernel",
    "sample_kernel",
    "diagnostics",
    "kappa_bruteforce",
]


@dataclass(frozen=True)
class CenteredKernel:
    """A symmetric kernel matrix together with how it was centered.

    centering is one of "population", "v_centered", "u_centered".
    population and v_centered matrices have zero row sums under their
    weights (atom probabilities, respectively 1/n); the u_centered
    variant deliberately does not.
    """

    matrix: np.ndarray
    centering: str

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("kernel matrix must be square")
        if self.centering not in ("population", "v_centered", "u_centered"):
            raise ValueError(f"unknown centering {self.centering!r}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class KernelDiagnostics:
    """Scalar summaries of the kernel of one distribution.

    trace   : sum of eigenvalues, equal to half the mean absolute
              difference of two independent draws
    sq_norm : sum of squared eigenvalues, E h(Z1, Z2)^2
    h00     : the kernel evaluated at the origin
    """

    trace: float
    sq_norm: float
    h00: float


def _center_distances(dist_matrix: np.ndarray, weights: np.ndarray, factor: float = 1.0):
    """-1/2 (D - f a_i - f a_j + f b) with a, b weighted row/grand means.

    Row means are accumulated in sorted order so the result is
    bit-identical however the underlying points were ordered.
    """
    weighted = dist_matrix * weights[np.newaxis, :]
    a = stable_sum(weighted, axis=1)
    b = stable_sum(a * weights)
    return -0.5 * (dist_matrix - factor * (a[:, np.newaxis] + a[np.newaxis, :] - b))


def population_kernel(d: DiscreteDist) -> CenteredKernel:
    """Kernel matrix h(z_i, z_j) on the support of a discrete distribution."""
    dist_matrix = np.abs(d.support[:, np.newaxis] - d.support[np.newaxis, :])
    return CenteredKernel(_center_distances(dist_matrix, d.probs), "population")


def sample_kernel(values, centering: str = "v_centered") -> CenteredKernel:
    """Kernel matrix of a sample, one row/column per observation.

    v_centered subtracts plain row and grand means of the distance
    matrix; u_centered scales all three centering terms by n/(n-1),
    which removes the leading bias of the plug-in covariance when the
    matrix is summed over distinct index pairs.
    """
    v = as_float_vector(values)
    n = v.size
    if n < 2:
        raise ValueError("need at least 2 observations")
    dist_matrix = np.abs(v[:, np.newaxis] - v[np.newaxis, :])
    weights = np.full(n, 1.0 / n)
    if centering == "v_centered":
        return CenteredKernel(_center_distances(dist_matrix, weights), "v_centered")
    if centering == "u_centered":
        factor = n / (n - 1.0)
        return CenteredKernel(_center_distances(dist_matrix, weights, factor), "u_centered")
    raise ValueError(f"unknown centering {centering!r}")


def _cdf_levels(d: DiscreteDist) -> np.ndarray:
    """Right-continuous CDF values on the open intervals between atoms."""
    return np.cumsum(d.probs)


def diagnostics(d: DiscreteDist) -> KernelDiagnostics:
    """trace, squared norm and origin value of the kernel of d.

    h00 is computed by exact piecewise integration of
    F(w)^2 on (-inf, 0) plus (1 - F(w))^2 on (0, inf); the CDF is a
    step function so only intervals between support points (with 0
    inserted) contribute.
    """
    m = population_kernel(d).matrix
    trace = float(stable_sum(d.probs * np.diag(m)))
    sq_norm = float(stable_sum((d.probs[:, np.newaxis] * d.probs[np.newaxis, :]) * m * m))

    points = np.unique(np.concatenate((d.support, [0.0])))
    cdf = d.mid_cdf(0.5 * (points[:-1] + points[1:]))  # interval interiors
    lengths = np.diff(points)
    mids = 0.5 * (points[:-1] + points[1:])
    left = mids < 0.0
    h00 = float(np.sum(lengths[left] * cdf[left] ** 2)
                + np.sum(lengths[~left] * (1.0 - cdf[~left]) ** 2))
    return KernelDiagnostics(trace=trace, sq_norm=sq_norm, h00=h00)


def kappa_bruteforce(joint: JointDist) -> float:
    """kappa of a finite bivariate table by direct double integration.

    Integrates [F12(x, y) - F1(x) F2(y)]^2 over the plane; the joint
    CDF is constant on the open rectangles of the support grid, so the
    integral is an exact finite sum.  Quadratic in the table size, for
    cross-checking the kernel-based estimators.
    """
    p = joint.probs
    if p.shape[0] < 2 or p.shape[1] < 2:
        return 0.0
    cell_cdf = np.cumsum(np.cumsum(p, axis=0), axis=1)[:-1, :-1]
    fx = np.cumsum(p.sum(axis=1))[:-1]
    fy = np.cumsum(p.sum(axis=0))[:-1]
    dx = np.diff(joint.x_support)
    dy = np.diff(joint.y_support)
    dev = cell_cdf - fx[:, np.newaxis] * fy[np.newaxis, :]
    return float(np.einsum("i,ij,j->", dx, dev * dev, dy))
