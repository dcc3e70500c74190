"""Topological-entropy spectra of the (k, 2k) pattern-11 level sets on {0,1}^N."""

from .chains import ChainDecomposition, chain_head, chain_positions, decompose
from .counting import (
    ExactOverflowError,
    ProfileMatrix,
    brute_force_profile,
    chain_profile,
    count_A,
    count_B,
    counting_growth_rate,
    cover_bound,
    level_set_count,
    log_binomial,
    profile_matrix,
)
from .measure import (
    MeasureParams,
    cylinder_prob,
    empirical_local_entropy,
    expected_pair_freq,
    from_alpha,
    from_theta_alpha,
    h_n_increment,
    local_entropy,
    sample,
    xi,
)
from .spectra import (
    EmptyLevelSetError,
    PSRoots,
    SpectrumPoint,
    binary_entropy,
    h_A_alpha,
    h_freq,
    h_normal_alpha,
    solve_corollary_theta,
    solve_kps,
    solve_ps,
    spectrum_scan,
    theta_star_closed_form,
)

__version__ = "0.1.0"
