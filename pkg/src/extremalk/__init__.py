"""Limit laws of k-th upper order statistics under fixed and random sample sizes.

The package builds, from any base df ``F``, the tail-equivalent families
``H_k, F_k, U_k, R_k, T_k, B_k``; gives their norming constants; simulates
k-th upper order statistics with random sample sizes; and checks the
pointwise orderings between the families.
"""

from .distributions import (
    BaseDistribution,
    auxiliary_function,
    catalog,
    get_distribution,
    regular_variation_ratio,
    von_mises_ratio,
    weibull_variation_ratio,
)
from .laws import (
    MaxStableLaw,
    frechet,
    gumbel,
    limit_kth_cdf,
    max_stable_cdf,
    max_stable_quantile,
    stability_norming,
    weibull,
)
from .norming import NormingSequence, base_norming, eta_constant, transform_norming, verify_norming
from .ordering import check_ordering, ordering_report
from .simulation import (
    RngState,
    convergence_study,
    coupled_law,
    kth_upper_order_stat,
    ks_distance,
    predicted_limit,
    sample_size,
)
from .transforms import (
    DerivedDistribution,
    TailTransform,
    TauSpec,
    burr_ode_residual,
    empirical_tail_ratio,
    limit_law_cdf,
    recurrence_residual,
    tail_equivalence_constant,
    transform_cdf,
    transform_pdf,
    transform_quantile,
    transform_sf,
)

__version__ = "0.1.0"
