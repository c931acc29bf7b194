"""High-precision dissection of Mertens' prime product: truncated prime
zeta sums over k-almost-prime smooth numbers, the coefficient sequence c_k
with its induced variants and expansion constants, and uniform-range
analytic estimates with Cauchy coefficient extraction."""

from .coefficients import (
    CoefficientSeries,
    InducedSeries,
    Partition,
    alpha_p,
    c_partition,
    c_recursive,
    eta_p,
    eta_shifted,
    exp_transform,
    exp_transform_partition,
    expansion_remainder,
    induced_explicit,
    induced_recursion_check,
    induced_series,
    partitions,
)
from .dissection import (
    DissectionEstimate,
    SmoothSumResult,
    bounded_sum,
    dissection_resum,
    friable_ratio,
    smooth_sum_brute,
    smooth_sum_newton,
    smooth_sum_partition,
    theorem_main_term,
)
from .errors import (
    DomainError,
    MertensError,
    NearPoleError,
    PrecisionError,
    ResourceError,
)
from .numerics import BigReal, PrecisionContext, euler_gamma, gamma, riemann_zeta
from .prime_zeta import (
    MertensConstants,
    PrimeZetaValue,
    TailSequence,
    mertens_beta,
    mertens_diagnostics,
    prime_zeta,
    tail_sequence,
    truncated_prime_zeta,
    truncated_prime_zeta_exact,
)
from .primes import (
    FactorTables,
    PrimeTable,
    factor_tables,
    largest_prime_factor,
    load_prime_cache,
    save_prime_cache,
    sieve,
)
from .uniform import (
    AnalyticFactor,
    ContourResult,
    ContourSpec,
    contour_extract,
    contour_extract_auto,
    eta_fn,
    f_x,
    lambda_fn,
    nu,
    sathe_selberg_estimate,
    uniform_estimate,
)

__version__ = "0.1.0"
