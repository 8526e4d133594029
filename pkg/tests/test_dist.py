"""Distribution layer: order indicator, mid-rank CDFs, families."""

import numpy as np
import pytest
from scipy import stats

from rhostar.dist import (DiscreteDist, JointDist, discretize, empirical_dist,
                          gamma_ind, get_family, mid_cdf)


def test_gamma_ind_ordering():
    x = np.array([1.0, 2.0, 3.0])
    assert np.array_equal(gamma_ind(x, 2.0), [1.0, 0.5, 0.0])
    # vectorized in both arguments via broadcasting
    out = gamma_ind(x[:, None], x[None, :])
    assert np.array_equal(np.diag(out), [0.5, 0.5, 0.5])
    assert out[0, 2] == 1.0 and out[2, 0] == 0.0


def test_mid_cdf_ties():
    z = np.array([1.0, 2.0, 2.0, 5.0])
    # P(Z<2) + .5 P(Z=2) = 1/4 + 1/4 = 1/2
    assert mid_cdf(z, 2.0) == pytest.approx(0.5)
    assert mid_cdf(z, np.array([1.0, 5.0])) == pytest.approx([1 / 8, 7 / 8])
    # strictly between atoms the mid CDF is the plain CDF
    assert mid_cdf(z, 3.0) == pytest.approx(0.75)


def test_discrete_dist_validation():
    with pytest.raises(ValueError):
        DiscreteDist([1.0, 1.0], [0.5, 0.5])  # duplicate atoms
    with pytest.raises(ValueError):
        DiscreteDist([1.0, 2.0], [0.6, 0.6])  # not a distribution
    with pytest.raises(ValueError):
        DiscreteDist([2.0, 1.0], [0.5, 0.5])  # not sorted
    d = DiscreteDist([0.0, 1.0], [0.25, 0.75])
    assert d.mean() == pytest.approx(0.75)
    assert d.mid_cdf(0.0) == pytest.approx(0.125)


def test_joint_dist_margins():
    jd = JointDist([0.0, 1.0], [0.0, 1.0, 2.0],
                   np.array([[0.1, 0.2, 0.1], [0.3, 0.2, 0.1]]))
    assert jd.margin_x().probs == pytest.approx([0.4, 0.6])
    assert jd.margin_y().probs == pytest.approx([0.4, 0.4, 0.2])


def test_empirical_dist_counts():
    d = empirical_dist(np.array([3.0, 1.0, 3.0, 3.0]))
    assert np.array_equal(d.support, [1.0, 3.0])
    assert d.probs == pytest.approx([0.25, 0.75])


def test_discretize_uniform_cells():
    d = discretize(get_family("uniform"), 4)
    assert d.probs == pytest.approx([0.25] * 4)
    assert d.support == pytest.approx([1 / 8, 3 / 8, 5 / 8, 7 / 8])
    with pytest.raises(ValueError):
        discretize(get_family("uniform"), 1)


def test_family_quantiles_match_scipy():
    u = np.linspace(0.01, 0.99, 23)
    pairs = [("logistic", stats.logistic), ("normal", stats.norm),
             ("laplace", stats.laplace), ("uniform", stats.uniform),
             ("exponential", stats.expon)]
    for name, ref in pairs:
        fam = get_family(name)
        assert fam.quantile(u) == pytest.approx(ref.ppf(u), abs=1e-12), name
        assert fam.cdf(fam.quantile(u)) == pytest.approx(u, abs=1e-12), name


def test_normal_quantile_tails():
    # the rational approximation is polished to near machine precision
    fam = get_family("normal")
    u = np.array([1e-12, 1e-8, 0.3, 0.5, 0.7, 1 - 1e-8])
    assert fam.quantile(u) == pytest.approx(stats.norm.ppf(u), abs=1e-10)
    assert fam.quantile(0.5) == 0.0


def test_pdf_at_quantile_consistency():
    u = np.linspace(0.05, 0.95, 7)
    for name in ("uniform", "logistic", "normal", "exponential", "laplace"):
        fam = get_family(name)
        want = fam.pdf(fam.quantile(u))
        assert fam.pdf_at_quantile(u) == pytest.approx(want, rel=1e-9), name


def test_get_family_unknown():
    with pytest.raises(ValueError):
        get_family("cauchy")
