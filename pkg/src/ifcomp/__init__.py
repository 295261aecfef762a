"""Rates and bounds for interactive function computation over finite alphabets.

Two terminals observe correlated sources and exchange messages until each
can compute its own function of both; the quantities of interest are the
per-message rates and their sum.  The package computes achievable sum rates
of explicit message chains, searches for good chains, evaluates lower
bounds, allocates rates along infinite-message limits for independent
binary sources, and bounds rates in small networks through cut-set linear
programs.

Modules:
    info_core           pmfs, entropies, function tables, common sources
    structure_analysis  combinatorial structure of protocols and functions
    sum_rate            chains, feasibility, bounds, exact and heuristic search
    rate_allocation     allocation curves, staircases, infinite-message limits
    multiterminal       networks, cut-set LPs, reference schemes, schedules
    cli                 the ifcomp command line front end
"""

from .info_core import (
    Bits,
    CapacityError,
    DomainError,
    FunctionTable,
    JointPmf,
    and_function,
    bernoulli_product,
    binary_entropy,
    conditional_entropy,
    conditional_mutual_information,
    constant_function,
    dsbs,
    entropy,
    mutual_information,
    product_function,
    with_function_axis,
    xor_function,
)
from .structure_analysis import (
    Rectangle,
    SliceClass,
    classify_slices,
    han_kobayashi_condition,
    is_monochromatic,
    is_rectangle,
    one_message_lower_bound,
    slice_structure_report,
    support,
    verify_w_decomposition,
)
from .sum_rate import (
    AuxChain,
    SumRateResult,
    and_three_message_chain,
    and_three_message_rate,
    best_lower_bound,
    cardinality_bound,
    chain_joint,
    chain_sum_rate,
    check_membership,
    computability_residuals,
    cutset_lower_bound,
    independent_noise_exact_rate,
    infinite_message_lower_bound,
    message_rates,
    min_sum_rate_bruteforce,
    min_sum_rate_penalty,
    pad_chain,
)
from .rate_allocation import (
    AllocationCurve,
    closed_form_infinite_rate,
    diagonal_curve,
    integral_sum_rate,
    optimal_curve,
    region_split,
    staircase_chain,
    staircase_rates,
    staircase_sum_rate,
    two_message_rates,
    uniform_partition,
)
from .multiterminal import (
    LPProblem,
    LPSolution,
    NetworkSpec,
    build_cutset_lp,
    concurrent_to_alternating,
    cut_entropy_bound,
    merge_schedule_rates,
    modulo_sum_rates,
    relay_rates,
    solve_lp,
    solve_lp_by_vertices,
    star_and_rates,
    star_and_total,
    star_fair_bit_limit,
    validate_alternating_schedule,
)

__all__ = [name for name in dir() if not name.startswith("_")]
