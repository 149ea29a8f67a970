"""Correlated and constrained correlated equilibria of finite normal-form games."""
from .canonical import DeviationMap, all_deviation_maps, cce_mask, is_cce_distribution, z_transform
from .constraints import FeasibleSet, full, intersection, linear, pure_only, support_positive, support_zero, sw_floor
from .device import (
    CorrelatedProfile,
    CorrelationDevice,
    ExtendedGame,
    canonical_device,
    derandomize,
    enumerate_strategies,
    extend,
    identity_profile,
    induced_distribution,
    lift_deviation,
    make_mixed_profile,
    make_profile,
    profile_distribution,
    profile_utility,
    trivial_device,
)
from .equilibrium import (
    alternative_characterization_check,
    ce_distribution_inequalities,
    ce_mask,
    ex_post_check,
    explicit,
    generated,
    is_ce_distribution,
    is_constrained_correlated_equilibrium,
    is_correlated_equilibrium,
    is_generalized_nash,
    partial_deviation_check,
    per_outcome_sufficient,
    unconstrained,
)
from .errors import CapabilityError, CCEError, DomainError, InputError, ResourceError
from .explorer import certify_c_cap_d_empty, classify, explore, grid_array, payoff_extremes, simplex_grid
from .fixedpoint import find_fixed_point, g_map, multi_start, phi
from .game import Game, expected_utility, make_game, point_mass, pure_nash_equilibria, social_welfare
from .report import EquilibriumReport, Witness
