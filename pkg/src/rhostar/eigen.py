"""Spectral decomposition of the centered distance kernel.

Two independent routes compute the same eigensystem of a discrete
distribution: a dense symmetric solve of the weighted kernel matrix,
and a tridiagonal solve of the equivalent second-order difference
equation, which costs O(K) memory and is the practical choice for
fine discretizations.  Closed forms for the uniform, logistic and
two-point cases serve as references.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dist import DiscreteDist
from .kernel import population_kernel

__all__ = [
    "EigenSystem",
    "eigensystem_dense",
    "eigensystem_tridiag",
    "closed_form",
    "canonicalize_signs",
    "dichotomous",
]

_ZERO_CUT = 1e-12  # relative to the largest eigenvalue
_SIGN_CUT = 1e-9   # relative to max |g| when locating the leading nonzero


@dataclass(frozen=True)
class EigenSystem:
    """Positive eigenvalues and weight-orthonormal eigenfunctions.

    eigenvalues : nonincreasing, strictly positive
    functions   : functions[k, i] = g_{k+1}(z_i) on dist.support
    dist        : the distribution the kernel was built from

    The functions have weighted mean zero, are orthonormal under the
    atom weights, and reconstruct the kernel matrix as
    sum_k lam_k g_k(z_i) g_k(z_j).
    """

    eigenvalues: np.ndarray
    functions: np.ndarray
    dist: DiscreteDist

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float)
        g = np.asarray(self.functions, dtype=float)
        if lam.ndim != 1 or g.ndim != 2 or g.shape[0] != lam.size:
            raise ValueError("functions must have one row per eigenvalue")
        if g.shape[1] != self.dist.size:
            raise ValueError("function rows must match the support size")
        lam.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "functions", g)

    @property
    def count(self) -> int:
        return self.eigenvalues.size


def dichotomous(p: float) -> DiscreteDist:
    """Two-point distribution on {0, 1} with P(Z=0) = p."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    return DiscreteDist([0.0, 1.0], [p, 1.0 - p])


def _canonical_rows(functions: np.ndarray) -> np.ndarray:
    """Flip rows so each is positive at its first significant entry."""
    out = np.array(functions, dtype=float)
    for row in out:
        scale = np.max(np.abs(row))
        if scale == 0.0:
            raise ValueError("eigenfunction is identically zero")
        nz = np.nonzero(np.abs(row) > _SIGN_CUT * scale)[0]
        if row[nz[0]] < 0.0:
            row *= -1.0
    return out


def _ordered(lam: np.ndarray, g: np.ndarray, dist: DiscreteDist) -> EigenSystem:
    """Sort nonincreasing; exact eigenvalue ties break on g(z_1)."""
    g = _canonical_rows(g)
    order = sorted(range(lam.size), key=lambda i: (-lam[i], g[i, 0]))
    return EigenSystem(lam[order], g[order], dist)


def eigensystem_dense(d: DiscreteDist) -> EigenSystem:
    """Eigensystem via the symmetrized kernel matrix.

    With s = sqrt(probs), the matrix s_i s_j h(z_i, z_j) is symmetric
    and has the kernel's eigenvalues; its unit eigenvectors divided by
    s are the weight-orthonormal eigenfunctions.  Eigenvalues below
    1e-12 of the largest (there is always one structural zero, the
    constant function) are dropped.
    """
    if d.size < 2:
        raise ValueError("need a support of at least 2 points")
    s = np.sqrt(d.probs)
    sym = population_kernel(d).matrix * s[:, np.newaxis] * s[np.newaxis, :]
    w, v = np.linalg.eigh(sym)
    keep = w > _ZERO_CUT * w[-1]
    lam = w[keep]
    g = (v[:, keep] / s[:, np.newaxis]).T
    return _ordered(lam, g, d)


def eigensystem_tridiag(d: DiscreteDist) -> EigenSystem:
    """Eigensystem via the second-order difference equation.

    On a discrete support the kernel eigenpair relation is equivalent
    to the generalized problem  diag(p) g = lam L g  with L the
    weighted path Laplacian built from inverse gaps
    c_i = 1/(z_i - z_{i-1}):

        (L g)_1 = c_2 (g_1 - g_2)
        (L g)_i = -c_i g_{i-1} + (c_i + c_{i+1}) g_i - c_{i+1} g_{i+1}
        (L g)_K = c_K (g_K - g_{K-1})

    Substituting y = sqrt(p) g turns this into an ordinary symmetric
    tridiagonal eigenproblem whose spectrum is 1/lam plus one
    structural zero for the constant function, which is discarded.
    """
    if d.size < 2:
        raise ValueError("need a support of at least 2 points")
    p = d.probs
    c = 1.0 / np.diff(d.support)          # c[i] couples atoms i and i+1
    diag = np.zeros(d.size)
    diag[:-1] += c
    diag[1:] += c
    diag /= p
    off = -c / np.sqrt(p[:-1] * p[1:])
    theta, y = scipy.linalg.eigh_tridiagonal(diag, off)
    lam = 1.0 / theta[1:]
    g = (y[:, 1:] / np.sqrt(p)[:, np.newaxis]).T
    return _ordered(lam, g, d)


def canonicalize_signs(sys: EigenSystem) -> EigenSystem:
    """Flip eigenfunctions to the package convention.

    Each g is made positive at the smallest support point where
    |g| exceeds 1e-9 of its maximum; applying the operation twice
    changes nothing.
    """
    return EigenSystem(sys.eigenvalues, _canonical_rows(sys.functions), sys.dist)


def closed_form(family: str, k: int, p: float | None = None):
    """Reference eigenpair (eigenvalue, evaluator) for solvable cases.

    uniform      : lam_k = 1/(k pi)^2,  q_k(u) = sqrt(2) cos(k pi u)
    logistic     : lam_k = 1/(k (k+1)), q_k(u) = sqrt(2k+1) P_k(2u - 1)
                   with P_k the Legendre polynomial
    dichotomous  : lam_1 = p(1-p), g_1(z) = [z - (1-p)] / sqrt(p(1-p));
                   requires the weight p of the atom at 0, and k = 1
                   (the kernel has a single positive eigenvalue)

    The uniform and logistic evaluators take the probability scale
    u in [0, 1]; the dichotomous evaluator takes the value z.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if family == "uniform":
        lam = 1.0 / (k * k * math.pi * math.pi)
        return lam, lambda u, _k=k: math.sqrt(2.0) * np.cos(_k * math.pi * np.asarray(u, dtype=float))
    if family == "logistic":
        from scipy.special import eval_legendre

        lam = 1.0 / (k * (k + 1.0))
        return lam, lambda u, _k=k: math.sqrt(2.0 * _k + 1.0) * eval_legendre(
            _k, 2.0 * np.asarray(u, dtype=float) - 1.0)
    if family == "dichotomous":
        if p is None or not 0.0 < p < 1.0:
            raise ValueError("dichotomous closed form needs p in (0, 1)")
        if k != 1:
            raise ValueError("the two-point kernel has a single positive eigenvalue")
        lam = p * (1.0 - p)
        root = math.sqrt(lam)
        return lam, lambda z, _m=1.0 - p, _r=root: (np.asarray(z, dtype=float) - _m) / _r
    raise ValueError(f"no closed form for family {family!r}")
