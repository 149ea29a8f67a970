"""Equilibrium conditions on extended games.

All checks use weak inequalities with slack ``EPS_EQ`` (no slack for exact
inputs). A failing report carries the first failing deviation in enumeration
order (players in order, then strategies in the order of
:func:`ccelab.device.enumerate_strategies`).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .constraints import FeasibleSet
from .device import (
    DEFAULT_CAP,
    CorrelatedProfile,
    CorrelationDevice,
    ExtendedGame,
    _distribution,
    check_profile_for,
    enumerate_strategies,
    profile_utility,
)
from .errors import ResourceError
from .game import Game, check_distribution, check_profile
from .numeric import EPS_EQ, promote, tolerance
from .report import EquilibriumReport, Witness


# Coupled constraint sets ------------------------------------------------------


class CoupledConstraintSet:
    """Subset of joint correlated strategy profiles."""

    def contains(self, game: Game, device: CorrelationDevice, profile: CorrelatedProfile) -> bool:
        raise NotImplementedError


class Unconstrained(CoupledConstraintSet):
    def contains(self, game, device, profile):
        return True


class ExplicitProfiles(CoupledConstraintSet):
    """A finite list of allowed profiles, stored as per-player outcome-to-action maps."""

    def __init__(self, profiles):
        self.profiles = frozenset(p.maps if isinstance(p, CorrelatedProfile) else
                                  tuple(tuple(m) for m in p) for p in profiles)

    def contains(self, game, device, profile):
        return profile.maps in self.profiles

    def __len__(self):
        return len(self.profiles)


class GeneratedBy(CoupledConstraintSet):
    """Profiles whose induced distribution lies in a feasible set ``C``."""

    def __init__(self, C: FeasibleSet):
        self.C = C

    def contains(self, game, device, profile):
        return self.C.contains(_distribution(game, device, profile.maps))


def explicit(extended: ExtendedGame, index_profiles) -> ExplicitProfiles:
    """Constraint set from joint strategy indices of an extended game."""
    return ExplicitProfiles(extended.profile(idx) for idx in index_profiles)


def generated(C: FeasibleSet) -> GeneratedBy:
    return GeneratedBy(C)


def unconstrained() -> Unconstrained:
    return Unconstrained()


# Helpers -------------------------------------------------------------------


def _deviations(game, device, profile, player, cap):
    for k, amap in enumerate(enumerate_strategies(device, game, player, cap)):
        yield k, amap, profile.replace(player, amap)


def _tol(eps, game, device):
    return tolerance(eps, game.payoffs, device.q)


def _witness(player, k, amap, gain):
    return Witness(player, {"index": k, "map": list(amap)}, gain)


def _feasible_deviation_scan(game, device, R, profile, eps, cap, feasible_only=True):
    """Shared loop for Nash-type conditions: compare u_i of every (feasible) deviation."""
    tol = _tol(eps, game, device)
    base = profile_utility(game, device, profile)
    report = EquilibriumReport(True)
    for i in range(game.n_players):
        for k, amap, dev in _deviations(game, device, profile, i, cap):
            if amap == profile.maps[i]:
                continue
            if feasible_only and not R.contains(game, device, dev):
                continue
            margin = base[i] - profile_utility(game, device, dev)[i]
            report.margins.append(((i, k), margin))
            if margin < -tol:
                if report.verdict:
                    report.witnesses.append(_witness(i, k, amap, -margin))
                report.verdict = False
    return report


# Correlated equilibrium ------------------------------------------------------


def is_correlated_equilibrium(game: Game, device: CorrelationDevice, profile,
                              eps: float = EPS_EQ, cap: int = DEFAULT_CAP) -> EquilibriumReport:
    """No measurable deviation raises a player's ex-ante utility."""
    profile = check_profile_for(game, device, profile)
    return _feasible_deviation_scan(game, device, Unconstrained(), profile, eps, cap)


def ex_post_check(game: Game, device: CorrelationDevice, profile, eps: float = EPS_EQ) -> EquilibriumReport:
    """Cell-by-cell condition: on every cell, no single replacement action is better on average."""
    profile = check_profile_for(game, device, profile)
    u, q = promote(game.payoffs, device.q)
    tol = _tol(eps, game, device)
    report = EquilibriumReport(True)
    for i in range(game.n_players):
        for c, cell in enumerate(device.partitions[i]):
            here = sum(q[w] * u[profile.at(w)][i] for w in cell)
            for a in range(game.shape[i]):
                alt = sum(q[w] * u[_swap(profile.at(w), i, a)][i] for w in cell)
                margin = here - alt
                report.margins.append(((i, c, a), margin))
                if margin < -tol:
                    if report.verdict:
                        report.witnesses.append(Witness(i, {"cell": c, "action": a}, -margin))
                    report.verdict = False
    return report


def _swap(profile, player, action):
    out = list(profile)
    out[player] = action
    return tuple(out)


# CE polytope ---------------------------------------------------------------


@dataclass(frozen=True)
class Inequality:
    """``coeffs @ p >= rhs`` (or ``==`` when ``equality``) over the row-major profile ordering."""

    coeffs: np.ndarray
    rhs: object
    label: tuple
    equality: bool = False

    def slack(self, p):
        c, p = promote(self.coeffs, np.asarray(p))
        return p @ c - self.rhs


def ce_distribution_inequalities(game: Game, include_simplex: bool = True) -> list:
    """Incentive inequalities of the CE polytope, one per (player, action, replacement) pair.

    The simplex constraints (non-negativity and total mass one) follow when
    ``include_simplex`` is set.
    """
    out = []
    U = game.payoff_matrix()
    grid = np.indices(game.shape).reshape(game.n_players, -1).T
    for i in range(game.n_players):
        for a in range(game.shape[i]):
            for b in range(game.shape[i]):
                if a == b:
                    continue
                coeffs = np.zeros(game.n_profiles, dtype=U.dtype)
                if U.dtype == object:
                    coeffs[:] = 0
                for k, prof in enumerate(grid):
                    if prof[i] != a:
                        continue
                    coeffs[k] = U[k, i] - U[game.profile_index(_swap(prof, i, b)), i]
                out.append(Inequality(coeffs, 0, ("incentive", i, a, b)))
    if include_simplex:
        for k in range(game.n_profiles):
            e = np.zeros(game.n_profiles, dtype=int)
            e[k] = 1
            out.append(Inequality(e, 0, ("nonnegative", k)))
        out.append(Inequality(np.ones(game.n_profiles, dtype=int), 1, ("total",), equality=True))
    return out


def ce_polytope(game: Game):
    """``(G, h, E, f)`` describing the CE polytope as ``G p >= h, E p = f, p >= 0``."""
    rows = ce_distribution_inequalities(game, include_simplex=False)
    n = game.n_profiles
    G = np.array([list(r.coeffs) for r in rows], dtype=object).reshape(-1, n)
    h = np.zeros(len(rows), dtype=int)
    return G, h, np.ones((1, n), dtype=int), np.ones(1, dtype=int)


def is_ce_distribution(game: Game, p, eps: float = EPS_EQ) -> EquilibriumReport:
    p = check_distribution(game, p)
    tol = tolerance(eps, p, game.payoffs)
    report = EquilibriumReport(True)
    for ineq in ce_distribution_inequalities(game, include_simplex=False):
        s = ineq.slack(p)
        report.margins.append((ineq.label, s))
        if s < -tol:
            if report.verdict:
                _, i, a, b = ineq.label
                report.witnesses.append(Witness(i, {"from": a, "to": b}, -s))
            report.verdict = False
    return report


def ce_mask(game: Game, P, eps: float = EPS_EQ) -> np.ndarray:
    """Vectorized CE-polytope membership for the rows of ``P``."""
    G, _, _, _ = ce_polytope(game)
    G, X = promote(G, np.asarray(P))
    tol = tolerance(eps, G, X)
    return np.all(X @ G.T >= -tol, axis=1)


# Generalized Nash and constrained correlated equilibrium ----------------------------


def is_generalized_nash(game: Game, R, profile, eps: float = EPS_EQ) -> EquilibriumReport:
    """Generalized Nash check on any finite game.

    ``R`` is a collection of allowed pure profiles (index tuples) or a predicate
    on them; ``None`` means every profile is allowed.
    """
    profile = check_profile(game, profile)
    if R is None:
        allowed = lambda a: True  # noqa: E731
    elif callable(R):
        allowed = R
    else:
        members = {tuple(int(k) for k in a) for a in R}
        allowed = members.__contains__
    if not allowed(profile):
        return EquilibriumReport.infeasible()
    tol = tolerance(eps, game.payoffs)
    report = EquilibriumReport(True)
    for i in range(game.n_players):
        here = game.payoffs[profile][i]
        for k in range(game.shape[i]):
            if k == profile[i]:
                continue
            dev = _swap(profile, i, k)
            if not allowed(dev):
                continue
            margin = here - game.payoffs[dev][i]
            report.margins.append(((i, k), margin))
            if margin < -tol:
                if report.verdict:
                    report.witnesses.append(Witness(i, k, -margin))
                report.verdict = False
    return report


def is_constrained_correlated_equilibrium(game: Game, device: CorrelationDevice, R: CoupledConstraintSet,
                                          profile, eps: float = EPS_EQ,
                                          cap: int = DEFAULT_CAP) -> EquilibriumReport:
    """Feasible profile with no feasible unilateral deviation that raises utility."""
    profile = check_profile_for(game, device, profile)
    if not R.contains(game, device, profile):
        return EquilibriumReport.infeasible()
    return _feasible_deviation_scan(game, device, R, profile, eps, cap)


def alternative_characterization_check(game: Game, device: CorrelationDevice, R: CoupledConstraintSet,
                                       profile, eps: float = EPS_EQ,
                                       cap: int = DEFAULT_CAP) -> EquilibriumReport:
    """Every deviation either does not raise utility or leaves ``R``.

    Scans the whole strategy set and tests the disjunction per deviation,
    instead of pre-filtering to the feasible ones.
    """
    profile = check_profile_for(game, device, profile)
    if not R.contains(game, device, profile):
        return EquilibriumReport.infeasible()
    tol = _tol(eps, game, device)
    base = profile_utility(game, device, profile)
    report = EquilibriumReport(True)
    for i in range(game.n_players):
        for k, amap, dev in _deviations(game, device, profile, i, cap):
            margin = base[i] - profile_utility(game, device, dev)[i]
            feasible = R.contains(game, device, dev)
            if feasible:
                # infeasible deviations satisfy the disjunction whatever their gain
                report.margins.append(((i, k), margin))
            if margin < -tol and feasible:
                if report.verdict:
                    report.witnesses.append(_witness(i, k, amap, -margin))
                report.verdict = False
    return report


def per_outcome_sufficient(game: Game, device: CorrelationDevice, R: CoupledConstraintSet,
                           profile, eps: float = EPS_EQ, cap: int = DEFAULT_CAP) -> EquilibriumReport:
    """Sufficient condition: every feasible deviation loses on every cell of the deviator's partition.

    Passing implies the constrained equilibrium condition; the converse fails in general.
    """
    profile = check_profile_for(game, device, profile)
    if not R.contains(game, device, profile):
        return EquilibriumReport.infeasible()
    u, q = promote(game.payoffs, device.q)
    tol = _tol(eps, game, device)
    report = EquilibriumReport(True)
    for i in range(game.n_players):
        for k, amap, dev in _deviations(game, device, profile, i, cap):
            if not R.contains(game, device, dev):
                continue
            for c, cell in enumerate(device.partitions[i]):
                margin = sum(q[w] * (u[profile.at(w)][i] - u[dev.at(w)][i]) for w in cell)
                report.margins.append(((i, k, c), margin))
                if margin < -tol:
                    if report.verdict:
                        w = _witness(i, k, amap, -margin)
                        w.note = f"cell {c}"
                        report.witnesses.append(w)
                    report.verdict = False
    return report


def partial_deviation_check(game: Game, device: CorrelationDevice, R: CoupledConstraintSet,
                            profile, eps: float = EPS_EQ) -> EquilibriumReport:
    """Only feasible deviations that change the action on a single cell are considered.

    Necessary for a constrained equilibrium but not sufficient.
    """
    profile = check_profile_for(game, device, profile)
    if not R.contains(game, device, profile):
        return EquilibriumReport.infeasible()
    u, q = promote(game.payoffs, device.q)
    tol = _tol(eps, game, device)
    report = EquilibriumReport(True)
    for i in range(game.n_players):
        own = profile.maps[i]
        for c, cell in enumerate(device.partitions[i]):
            for a in range(game.shape[i]):
                if own[cell[0]] == a:
                    continue
                amap = tuple(a if w in cell else own[w] for w in range(device.n_outcomes))
                dev = profile.replace(i, amap)
                if not R.contains(game, device, dev):
                    continue
                margin = sum(q[w] * (u[profile.at(w)][i] - u[dev.at(w)][i]) for w in cell)
                report.margins.append(((i, c, a), margin))
                if margin < -tol:
                    if report.verdict:
                        report.witnesses.append(Witness(i, {"cell": c, "action": a, "map": list(amap)}, -margin))
                    report.verdict = False
    return report


def all_profiles(game: Game, device: CorrelationDevice, cap: int = DEFAULT_CAP):
    """Every joint correlated profile in enumeration order (player 0 slowest)."""
    strategies = [enumerate_strategies(device, game, i, cap) for i in range(game.n_players)]
    total = int(np.prod([len(s) for s in strategies]))
    if total > cap:
        raise ResourceError(f"{total} joint profiles exceed cap {cap}")
    for combo in itertools.product(*strategies):
        yield CorrelatedProfile(combo)


def constrained_equilibria(game: Game, device: CorrelationDevice, R: CoupledConstraintSet,
                           eps: float = EPS_EQ, cap: int = DEFAULT_CAP) -> list:
    """All profiles passing :func:`is_constrained_correlated_equilibrium`."""
    return [prof for prof in all_profiles(game, device, cap)
            if is_constrained_correlated_equilibrium(game, device, R, prof, eps, cap).verdict]
