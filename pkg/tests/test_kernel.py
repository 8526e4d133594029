"""Centered distance kernel: exact matrices, diagnostics, brute force."""

import numpy as np
import pytest

from rhostar.dist import DiscreteDist, JointDist
from rhostar.eigen import dichotomous
from rhostar.kernel import (diagnostics, kappa_bruteforce, population_kernel,
                            sample_kernel)


def test_three_point_kernel_matrix():
    # equiprobable {0, 1, 2}: every entry is a small ninth
    d = DiscreteDist([0.0, 1.0, 2.0], [1 / 3] * 3)
    want = np.array([[5, -1, -4], [-1, 2, -1], [-4, -1, 5]]) / 9.0
    assert population_kernel(d).matrix == pytest.approx(want, abs=1e-15)


def test_dichotomous_kernel_matrix():
    d = dichotomous(0.3)
    want = np.array([[0.49, -0.21], [-0.21, 0.09]])
    assert population_kernel(d).matrix == pytest.approx(want, abs=1e-15)


def test_population_kernel_zero_row_sums():
    d = DiscreteDist([-1.0, 0.5, 2.0, 7.0], [0.1, 0.2, 0.3, 0.4])
    m = population_kernel(d).matrix
    assert m @ d.probs == pytest.approx(np.zeros(4), abs=1e-15)
    assert m == pytest.approx(m.T, abs=0)


def test_diagnostics_three_point():
    di = diagnostics(DiscreteDist([0.0, 1.0, 2.0], [1 / 3] * 3))
    assert di.trace == pytest.approx(4 / 9, rel=1e-14)
    assert di.sq_norm == pytest.approx(10 / 81, rel=1e-14)
    assert di.h00 == pytest.approx(5 / 9, rel=1e-14)


def test_diagnostics_dichotomous():
    di = diagnostics(dichotomous(0.3))
    assert di.trace == pytest.approx(0.21, rel=1e-14)
    assert di.sq_norm == pytest.approx(0.0441, rel=1e-13)
    # the support starts at 0, so h00 is the corner entry
    assert di.h00 == pytest.approx(0.49, rel=1e-14)


def test_diagnostics_match_matrix():
    d = DiscreteDist([-2.0, 0.0, 1.5], [0.5, 0.2, 0.3])
    di = diagnostics(d)
    m = population_kernel(d).matrix
    assert di.trace == pytest.approx(np.sum(d.probs * np.diag(m)), rel=1e-13)
    outer = d.probs[:, None] * d.probs[None, :]
    assert di.sq_norm == pytest.approx(np.sum(outer * m * m), rel=1e-13)
    assert di.h00 == pytest.approx(m[1, 1], rel=1e-13)  # atom at 0


def test_kappa_bruteforce_half_diagonal():
    jd = JointDist([0.0, 1.0], [0.0, 1.0], np.array([[0.5, 0.0], [0.0, 0.5]]))
    assert kappa_bruteforce(jd) == pytest.approx(1 / 16, rel=1e-14)


def test_kappa_bruteforce_degenerate_margin():
    jd = JointDist([0.0], [0.0, 1.0], np.array([[0.5, 0.5]]))
    assert kappa_bruteforce(jd) == 0.0


def test_kappa_bruteforce_independent_product():
    px = np.array([0.3, 0.7])
    py = np.array([0.2, 0.5, 0.3])
    jd = JointDist([0.0, 2.0], [1.0, 2.0, 4.0], np.outer(px, py))
    assert kappa_bruteforce(jd) == pytest.approx(0.0, abs=1e-15)


def test_sample_kernel_v_row_sums():
    rng = np.random.default_rng(0)
    v = rng.normal(size=12)
    m = sample_kernel(v, "v_centered").matrix
    assert m.sum(axis=0) == pytest.approx(np.zeros(12), abs=1e-12)


def test_sample_kernel_u_formula():
    # u centering scales each of the three centering terms by n/(n-1)
    v = np.array([0.0, 1.0, 3.0, 4.0])
    n = v.size
    dist = np.abs(v[:, None] - v[None, :])
    a = dist.mean(axis=1)
    b = a.mean()
    f = n / (n - 1.0)
    want = -0.5 * (dist - f * (a[:, None] + a[None, :] - b))
    assert sample_kernel(v, "u_centered").matrix == pytest.approx(want, rel=1e-14)


def test_sample_kernel_validation():
    with pytest.raises(ValueError):
        sample_kernel([1.0])
    with pytest.raises(ValueError):
        sample_kernel([1.0, 2.0], "w_centered")


def test_sample_kernel_shuffle_bit_identity():
    rng = np.random.default_rng(4)
    v = rng.normal(size=20)
    pi = rng.permutation(20)
    m = sample_kernel(v, "v_centered").matrix
    m_shuffled = sample_kernel(v[pi], "v_centered").matrix
    assert np.array_equal(m_shuffled, m[np.ix_(pi, pi)])
