"""Dependence measurement via kernel covariance decomposition.

The coefficient rho_star is a normalized covariance between distance
kernels of the two margins: zero exactly at independence, one exactly
under invertible functional dependence.  The package covers the
population objects (kernels, spectra), plug-in and unbiased
estimation, permutation and asymptotic tests, component analysis,
grade and K-sample variants, and weight diagnostics with plots.
"""

from .analyze import (AssociationWeights, frechet_curves, gen_demo_data,
                      lag_pairs, render_scatter_fig, render_scatter_svg,
                      weights_component, weights_overall, write_weights_csv)
from .datasets import mental_health
from .dist import (DiscreteDist, JointDist, NamedDist, discretize,
                   empirical_dist, gamma_ind, get_family, mid_cdf)
from .eigen import (EigenSystem, canonicalize_signs, closed_form, dichotomous,
                    eigensystem_dense, eigensystem_tridiag)
from .estimate import (Component, DegenerateMarginError,
                       DegenerateMarginWarning, DependenceReport, PairedSample,
                       ReconstructedTable, component_correlations,
                       dependence_report, empirical_joint, estimate_kappa,
                       expand_counts, reconstruct_table, rho_star)
from .grade import (GradeScale, KSampleData, grade_scale, grade_transform,
                    ksample_kappa, phi_at_cut, phi_weight)
from .infer import (ComponentTest, TestResult, asymptotic_pvalue,
                    component_tests, permutation_test)
from .kernel import (CenteredKernel, KernelDiagnostics, diagnostics,
                     kappa_bruteforce, population_kernel, sample_kernel)

__version__ = "0.1.0"

__all__ = [
    "AssociationWeights",
    "CenteredKernel",
    "Component",
    "ComponentTest",
    "DegenerateMarginError",
    "DegenerateMarginWarning",
    "DependenceReport",
    "DiscreteDist",
    "EigenSystem",
    "GradeScale",
    "JointDist",
    "KSampleData",
    "KernelDiagnostics",
    "NamedDist",
    "PairedSample",
    "ReconstructedTable",
    "TestResult",
    "asymptotic_pvalue",
    "canonicalize_signs",
    "closed_form",
    "component_correlations",
    "component_tests",
    "dependence_report",
    "diagnostics",
    "dichotomous",
    "discretize",
    "eigensystem_dense",
    "eigensystem_tridiag",
    "empirical_dist",
    "empirical_joint",
    "estimate_kappa",
    "expand_counts",
    "frechet_curves",
    "gamma_ind",
    "gen_demo_data",
    "get_family",
    "grade_scale",
    "grade_transform",
    "kappa_bruteforce",
    "ksample_kappa",
    "lag_pairs",
    "mental_health",
    "mid_cdf",
    "permutation_test",
    "phi_at_cut",
    "phi_weight",
    "population_kernel",
    "reconstruct_table",
    "render_scatter_fig",
    "render_scatter_svg",
    "rho_star",
    "sample_kernel",
    "weights_component",
    "weights_overall",
    "write_weights_csv",
]
