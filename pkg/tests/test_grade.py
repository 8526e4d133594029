"""Grade transforms, K-sample statistics, grade weight functions."""

import math

import numpy as np
import pytest

from rhostar.dist import get_family, mid_cdf
from rhostar.estimate import DegenerateMarginError, PairedSample, estimate_kappa
from rhostar.grade import (GradeScale, KSampleData, grade_scale, grade_transform,
                           ksample_kappa, phi_at_cut, phi_weight)


def test_uniform_grades_are_midranks():
    s = PairedSample([3.0, 1.0, 2.0], [1.0, 2.0, 3.0])
    g = grade_transform(s)
    assert g.x == pytest.approx([5 / 6, 1 / 6, 3 / 6])
    assert g.y == pytest.approx([1 / 6, 3 / 6, 5 / 6])


def test_tied_grades():
    s = PairedSample([1.0, 2.0, 2.0, 5.0], [1.0, 1.0, 2.0, 2.0])
    assert grade_transform(s).x == pytest.approx([1 / 8, 1 / 2, 1 / 2, 7 / 8])


def test_logistic_grades_two_points():
    g = grade_transform(PairedSample([10.0, 20.0], [1.0, 2.0]),
                        "logistic", "logistic")
    assert g.x == pytest.approx([-math.log(3.0), math.log(3.0)], rel=1e-14)


def test_grades_invariant_under_monotone_maps():
    rng = np.random.default_rng(11)
    x = rng.normal(size=40)
    y = rng.normal(size=40)
    base = grade_transform(PairedSample(x, y))
    warped = grade_transform(PairedSample(np.exp(x), y ** 3))
    assert np.array_equal(base.x, warped.x)
    assert np.array_equal(base.y, warped.y)


def test_grade_scale_coercion():
    fam = get_family("normal")
    assert grade_scale("normal").name == "normal"
    assert grade_scale(fam).name == "normal"
    assert grade_scale(GradeScale(fam)).name == "normal"
    with pytest.raises(ValueError):
        grade_scale("triangular")


def groups_fixture(seed=11):
    rng = np.random.default_rng(seed)
    return (rng.normal(size=11), rng.normal(size=7) + 0.4,
            rng.normal(size=9) - 0.2)


def test_ksample_equals_paired_expansion():
    g1, g2, g3 = groups_fixture()
    d = KSampleData([1.0, 2.0, 3.0], (g1, g2, g3))
    values = np.concatenate([g1, g2, g3])
    codes = np.repeat([1.0, 2.0, 3.0], [11, 7, 9])
    assert ksample_kappa(d) == pytest.approx(
        estimate_kappa(PairedSample(codes, values), "v"), rel=1e-12)
    # graded version grades only the response margin
    graded_values = mid_cdf(values, values)
    assert ksample_kappa(d, grade="uniform") == pytest.approx(
        estimate_kappa(PairedSample(codes, graded_values), "v"), rel=1e-12)


def test_ksample_merges_equal_scores():
    g1, g2, g3 = groups_fixture(5)
    merged = KSampleData([1.0, 1.0, 2.0], (g1, g2, g3))
    pooled = KSampleData([1.0, 2.0], (np.concatenate([g1, g2]), g3))
    assert ksample_kappa(merged) == pytest.approx(ksample_kappa(pooled), rel=1e-12)


def test_two_sample_reduction():
    # K = 2 collapses to p1^2 p2^2 times the integrated squared CDF gap
    rng = np.random.default_rng(3)
    a = rng.normal(size=8)
    b = rng.normal(size=13) + 0.3
    d = KSampleData([0.0, 1.0], (a, b))
    pooled = np.sort(np.concatenate([a, b]))
    support = np.unique(pooled)
    e1 = np.searchsorted(np.sort(a), support, side="right")[:-1] / a.size
    e2 = np.searchsorted(np.sort(b), support, side="right")[:-1] / b.size
    integral = float(np.sum((e1 - e2) ** 2 * np.diff(support)))
    p1 = a.size / pooled.size
    p2 = b.size / pooled.size
    assert ksample_kappa(d) == pytest.approx(p1 ** 2 * p2 ** 2 * integral, rel=1e-12)


def test_two_sample_cvm_constant():
    # on the uniform grade scale the statistic is the classical
    # two-sample Cramer-von Mises T up to the factor N^3/(n1 n2)
    rng = np.random.default_rng(8)
    a = rng.normal(size=9)
    b = rng.normal(size=14) + 0.5
    n1, n2 = a.size, b.size
    total = n1 + n2
    d = KSampleData([1.0, 2.0], (a, b))
    pooled = np.sort(np.concatenate([a, b]))
    e1 = np.searchsorted(np.sort(a), pooled, side="right") / n1
    e2 = np.searchsorted(np.sort(b), pooled, side="right") / n2
    t_classic = n1 * n2 / total ** 2 * np.sum((e1 - e2) ** 2)
    kappa = ksample_kappa(d, grade="uniform")
    assert kappa * total ** 3 / (n1 * n2) == pytest.approx(t_classic, rel=1e-12)


def test_ksample_degenerate_response():
    d = KSampleData([1.0, 2.0], (np.array([5.0, 5.0]), np.array([5.0])))
    assert ksample_kappa(d) == 0.0


def test_ksample_validation():
    with pytest.raises(ValueError):
        KSampleData([1.0, 2.0], (np.array([1.0]),))
    with pytest.raises(ValueError):
        KSampleData([1.0], (np.array([1.0]),))
    with pytest.raises(DegenerateMarginError):
        KSampleData([2.0, 2.0], (np.array([1.0]), np.array([2.0])))
    with pytest.raises(ValueError):
        KSampleData([1.0, 2.0], (np.array([]), np.array([2.0])))


def test_phi_weight_logistic_flat():
    u = np.array([0.1, 0.5, 0.9])
    w, wn = phi_weight("logistic", u)
    assert w == pytest.approx([1.0, 1.0, 1.0])
    assert wn == pytest.approx([1.0, 1.0, 1.0])


def test_phi_weight_uniform_peak():
    w, wn = phi_weight("uniform", 0.5)
    assert w == pytest.approx(0.25)
    assert wn == pytest.approx(1.5)  # normalized by the 1/6 constant
    with pytest.raises(ValueError):
        phi_weight("uniform", 0.0)


def test_phi_at_cut():
    balanced = PairedSample([1.0, 1.0, 2.0, 2.0], [1.0, 2.0, 1.0, 2.0])
    assert phi_at_cut(balanced, 1.5, 1.5) == pytest.approx(0.0, abs=1e-15)
    diagonal = PairedSample([1.0, 2.0], [1.0, 2.0])
    assert phi_at_cut(diagonal, 1.5, 1.5) == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(ValueError):
        phi_at_cut(diagonal, 0.0, 1.5)  # cut below the data range
