"""Independence tests for the dependence covariance.

Permutation tests hold the x column fixed and re-pair it with
permuted y values; both marginal kernels are built once, so each
replicate costs one elementwise matrix product.  The asymptotic null
of n * kappa is a weighted chi-square mixture driven by the two
marginal spectra and is evaluated by Monte Carlo.  Every random
stream is a counter-based generator keyed by (seed, replicate block),
which makes results independent of thread count and schedule.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from ._util import stable_sum
from .estimate import Component, DegenerateMarginError, PairedSample, _is_constant
from .kernel import sample_kernel

__all__ = [
    "TestResult",
    "ComponentTest",
    "permutation_test",
    "asymptotic_pvalue",
    "component_tests",
]

_STATISTICS = ("kappa_v", "kappa_u", "rho_star_v")
_EXHAUSTIVE_LIMIT = 8
_MC_BLOCK_BUDGET = 1 << 22  # scalars per Monte Carlo block


@dataclass(frozen=True)
class TestResult:
    """Outcome of one independence test."""

    statistic: float
    p_value: float
    method: str
    replicates: int
    seed: int | None


@dataclass(frozen=True)
class ComponentTest:
    """Normal test of a single component correlation.

    adjusted_p multiplies the raw two-sided p-value by
    sum(lam) sum(mu) / (lam_k mu_l), so small-eigenvalue components
    must clear a higher bar; significant compares it to the level the
    test was run at.
    """

    k: int
    l: int
    rho: float
    raw_p: float
    adjusted_p: float
    significant: bool


def _pair_stat_parts(s: PairedSample, statistic: str):
    """Kernel matrices and the scale turning their product sum into
    the test statistic.  The rho_star_v denominator is invariant under
    re-pairing, so it folds into the scale."""
    if statistic not in _STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}")
    if _is_constant(s.x) or _is_constant(s.y):
        raise DegenerateMarginError("permutation test undefined for constant margin")
    n = s.n
    if statistic == "kappa_u":
        h1 = sample_kernel(s.x, "u_centered").matrix
        h2 = sample_kernel(s.y, "u_centered").matrix
        scale = 2.0 / (n * (n - 1.0))
        return h1, h2, scale, True
    h1 = sample_kernel(s.x, "v_centered").matrix
    h2 = sample_kernel(s.y, "v_centered").matrix
    scale = 1.0 / (n * n)
    if statistic == "rho_star_v":
        kxx = stable_sum(h1 * h1) / (n * n)
        kyy = stable_sum(h2 * h2) / (n * n)
        scale /= math.sqrt(kxx * kyy)
    return h1, h2, scale, False


def _product_sum(h1, h2, strict_upper):
    if strict_upper:
        iu = np.triu_indices(h1.shape[0], k=1)
        return float(stable_sum(h1[iu] * h2[iu]))
    return float(stable_sum(h1 * h2))


def permutation_test(s: PairedSample, statistic: str = "kappa_v", B: int = 999,
                     seed: int | None = None, threads: int = 1,
                     exhaustive: bool = False) -> TestResult:
    """Permutation p-value for independence of the two margins.

    Random mode draws B permutations from streams keyed (seed, index)
    and reports the add-one p-value (1 + #{perm >= observed})/(B + 1).
    Exhaustive mode enumerates all n! orderings instead and reports
    the exact conditional p-value #{ordering >= observed}/n!, which
    counts the identity ordering in the numerator; B and seed are
    ignored there.
    """
    if s.n < 3:
        raise ValueError("need at least 3 pairs")
    h1, h2, scale, strict_upper = _pair_stat_parts(s, statistic)
    observed = scale * _product_sum(h1, h2, strict_upper)

    if exhaustive:
        if s.n > _EXHAUSTIVE_LIMIT:
            raise ValueError(f"exhaustive enumeration limited to n <= {_EXHAUSTIVE_LIMIT}")
        count = 0
        total = 0
        for perm in itertools.permutations(range(s.n)):
            pi = np.asarray(perm)
            stat = scale * _product_sum(h1, h2[np.ix_(pi, pi)], strict_upper)
            count += stat >= observed
            total += 1
        return TestResult(observed, count / total, "permutation", total, None)

    if B < 1:
        raise ValueError("B must be at least 1")
    if seed is None:
        raise ValueError("random permutation mode needs a seed")

    def run_block(indices):
        hits = 0
        for b in indices:
            rng = np.random.Generator(np.random.Philox(key=[seed, b]))
            pi = rng.permutation(s.n)
            stat = scale * _product_sum(h1, h2[np.ix_(pi, pi)], strict_upper)
            hits += stat >= observed
        return hits

    if threads > 1:
        chunks = [range(start, B, threads) for start in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            count = sum(pool.map(run_block, chunks))
    else:
        count = run_block(range(B))
    return TestResult(observed, (1.0 + count) / (B + 1.0), "permutation", B, seed)


def _mixture_block_size(pairs: int) -> int:
    return min(4096, max(1, _MC_BLOCK_BUDGET // max(pairs, 1)))


def asymptotic_pvalue(n: int, kappa_hat: float, lam, mu, mode: str = "v",
                      draws: int = 100_000, seed: int | None = None,
                      threads: int = 1) -> TestResult:
    """Monte Carlo p-value against the weighted chi-square mixture.

    Under independence n * kappa converges to sum_kl lam_k mu_l Z_kl^2
    for the plug-in estimate, with iid standard normal Z; the u
    variant replaces Z^2 by Z^2 - 1.  The mixture is truncated to the
    eigenvalues supplied.  Draw blocks are keyed (seed, block index)
    so thread count never changes the result.
    """
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if lam.size == 0 or mu.size == 0:
        raise ValueError("need at least one eigenvalue per margin")
    if mode not in ("v", "u"):
        raise ValueError(f"unknown mode {mode!r}")
    if draws < 1000:
        raise ValueError("draws must be at least 1000")
    if seed is None:
        raise ValueError("Monte Carlo evaluation needs a seed")
    observed = n * kappa_hat
    shift = lam.sum() * mu.sum() if mode == "u" else 0.0
    block = _mixture_block_size(lam.size * mu.size)
    nblocks = (draws + block - 1) // block

    def run_block(idx):
        rng = np.random.Generator(np.random.Philox(key=[seed, idx]))
        z = rng.standard_normal((block, lam.size, mu.size))
        t = np.einsum("i,bij,j->b", lam, z * z, mu) - shift
        if idx == nblocks - 1:
            t = t[: draws - idx * block]
        return int(np.count_nonzero(t >= observed))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            count = sum(pool.map(run_block, range(nblocks)))
    else:
        count = sum(run_block(i) for i in range(nblocks))
    return TestResult(observed, (1.0 + count) / (draws + 1.0), "asymptotic", draws, seed)


def component_tests(components, n: int, alpha: float = 0.05) -> list[ComponentTest]:
    """Normal tests of component correlations with weighted correction.

    raw_p is the two-sided tail of sqrt(n) * rho under N(0, 1).  The
    correction spreads the level over components proportionally to
    lam_k mu_l, using the eigenvalue sums over the distinct margins
    present in the list; pass an untruncated component list so those
    sums cover the full spectra.
    """
    components = list(components)
    if not components:
        raise ValueError("no components to test")
    lam_sum = sum({c.k: c.lam for c in components}.values())
    mu_sum = sum({c.l: c.mu for c in components}.values())
    out = []
    for c in components:
        raw = float(erfc(abs(c.rho) * math.sqrt(n) / math.sqrt(2.0)))
        adjusted = min(1.0, raw * lam_sum * mu_sum / (c.lam * c.mu))
        out.append(ComponentTest(c.k, c.l, c.rho, raw, adjusted, adjusted < alpha))
    return out
