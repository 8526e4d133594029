"""Covariance estimators, normalization, component decomposition."""

import warnings

import numpy as np
import pytest

from rhostar.dist import empirical_dist
from rhostar.estimate import (DegenerateMarginError, DegenerateMarginWarning,
                              PairedSample, component_correlations,
                              dependence_report, empirical_joint, estimate_kappa,
                              expand_counts, reconstruct_table, rho_star)
from rhostar.kernel import kappa_bruteforce


def make_sample(seed, n=40, slope=0.5):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=n)
    return PairedSample(x, slope * x + rng.normal(size=n))


def test_expand_counts_row_major():
    s = expand_counts(np.array([[2, 0], [1, 1]]))
    assert np.array_equal(s.x, [1.0, 1.0, 2.0, 2.0])
    assert np.array_equal(s.y, [1.0, 1.0, 1.0, 2.0])
    assert s.x_labels == ("1", "2") and s.y_labels == ("1", "2")
    assert s.categorical
    with pytest.raises(ValueError):
        expand_counts(np.array([[1, -1], [0, 2]]))
    with pytest.raises(ValueError):
        expand_counts(np.array([[1.5, 0.0], [0.0, 1.0]]))


def test_identity_sample_frozen_values():
    s = PairedSample([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert estimate_kappa(s, "v") == pytest.approx(10 / 81, rel=1e-14)
    assert estimate_kappa(s, "u") == pytest.approx(1 / 72, rel=1e-13)
    assert rho_star(s, "v") == 1.0


def test_small_permutation_frozen_values():
    s = PairedSample([1.0, 2.0, 3.0, 4.0], [2.0, 1.0, 4.0, 3.0])
    assert estimate_kappa(s, "v") == 0.140625
    assert estimate_kappa(s, "u") == pytest.approx(5 / 108, rel=1e-14)
    assert rho_star(s, "v") == pytest.approx(9 / 13, rel=1e-14)


def test_pairs_of_pairs_example():
    s = PairedSample([0.0, 0.0, 1.0, 1.0], [0.0, 0.0, 1.0, 1.0])
    assert estimate_kappa(s, "v") == pytest.approx(0.0625, rel=1e-14)


def test_kappa_scales_with_slope():
    s = make_sample(5, n=15)
    kxx = estimate_kappa(PairedSample(s.x, s.x), "v")
    kxy = estimate_kappa(PairedSample(s.x, 2.0 * s.x + 3.0), "v")
    assert kxy == pytest.approx(2.0 * kxx, rel=1e-12)


def test_rho_star_affine_invariant():
    s = make_sample(8)
    base = rho_star(s, "v")
    moved = PairedSample(3.0 * s.x - 1.0, 0.25 * s.y + 9.0)
    assert rho_star(moved, "v") == pytest.approx(base, rel=1e-12)


def test_rho_star_bounds_and_linear_case():
    for seed in range(5):
        s = make_sample(seed)
        r = rho_star(s, "v")
        assert 0.0 <= r <= 1.0
    s = make_sample(11, n=25)
    assert rho_star(PairedSample(s.x, -2.0 * s.x + 1.0), "v") == pytest.approx(1.0, abs=1e-12)


def test_matches_bruteforce_on_tables():
    rng = np.random.default_rng(2)
    for _ in range(20):
        counts = rng.integers(0, 6, size=(3, 4))
        if counts.sum() < 2 or (counts.sum(axis=1) > 0).sum() < 2 \
                or (counts.sum(axis=0) > 0).sum() < 2:
            continue
        s = expand_counts(counts)
        assert estimate_kappa(s, "v") == pytest.approx(
            kappa_bruteforce(empirical_joint(s)), abs=1e-10)


def test_component_decomposition_identity():
    for seed in (0, 1, 2):
        s = make_sample(seed, n=30)
        comps = component_correlations(s)
        total = sum(c.lam * c.mu * c.rho ** 2 for c in comps)
        assert total == pytest.approx(estimate_kappa(s, "v"), rel=1e-10)


def test_component_truncation_and_validation():
    s = expand_counts(np.array([[3, 1], [1, 3]]))
    comps = component_correlations(s, max_k=1, max_l=1)
    assert len(comps) == 1 and (comps[0].k, comps[0].l) == (1, 1)
    with pytest.warns(UserWarning, match="truncating"):
        component_correlations(s, max_k=5)
    with pytest.raises(ValueError):
        component_correlations(s, max_k=0)


def test_dependence_report_consistency():
    s = make_sample(3, n=20)
    rep = dependence_report(s)
    assert rep.kappa_v == estimate_kappa(s, "v")
    assert rep.kappa_u == estimate_kappa(s, "u")
    assert rep.rho_star_v == rho_star(s, "v")
    assert rep.eigen_x.count == rep.eigen_y.count == 19


def test_reconstruct_table_full_and_truncated():
    counts = np.array([[6, 1, 1], [1, 6, 1], [1, 1, 6]])
    s = expand_counts(counts)
    comps = component_correlations(s)
    dx, dy = empirical_dist(s.x), empirical_dist(s.y)
    full = reconstruct_table(dx, dy, comps)
    assert full.is_distribution
    assert full.probs == pytest.approx(empirical_joint(s).probs, abs=1e-12)
    # a hard diagonal truncated to one component drops below zero
    hard = expand_counts(np.array([[9, 0, 0], [0, 9, 0], [0, 0, 9]]))
    one = reconstruct_table(empirical_dist(hard.x), empirical_dist(hard.y),
                            [(1, 1, component_correlations(hard)[0].rho)])
    assert not one.is_distribution
    with pytest.raises(ValueError):
        reconstruct_table(dx, dy, [(5, 1, 0.2)])


def test_degenerate_margins():
    s = PairedSample([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
    with pytest.warns(DegenerateMarginWarning):
        assert estimate_kappa(s, "v") == 0.0
    with pytest.raises(DegenerateMarginError):
        rho_star(s, "v")
    with pytest.raises(ValueError):
        estimate_kappa(PairedSample([1.0], [2.0]), "v")
    with pytest.raises(ValueError):
        estimate_kappa(make_sample(0), "w")


def test_shuffle_bit_identity():
    s = make_sample(14, n=35)
    rng = np.random.default_rng(99)
    pi = rng.permutation(35)
    shuffled = PairedSample(s.x[pi], s.y[pi])
    assert estimate_kappa(shuffled, "v") == estimate_kappa(s, "v")
    assert estimate_kappa(shuffled, "u") == estimate_kappa(s, "u")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        a = component_correlations(s)
        b = component_correlations(shuffled)
    assert all(x.rho == y.rho for x, y in zip(a, b))


def test_paired_sample_validation():
    with pytest.raises(ValueError):
        PairedSample([1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        PairedSample([], [])
    with pytest.raises(ValueError):
        PairedSample([1.0, 3.0], [1.0, 2.0], x_labels=("a", "b"))
    s = PairedSample([1.0, 2.0], [2.0, 1.0], ("lo", "hi"), ("l", "h"))
    assert s.swap().x_labels == ("l", "h")
