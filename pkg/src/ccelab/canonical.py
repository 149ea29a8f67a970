"""Deviation maps on the canonical device.

A deviation map of player ``i`` relabels her recommended action. Applying it
to a distribution ``p`` moves the mass of every profile ``(b_i, a_-i)`` to
``(beta(b_i), a_-i)`` (the ``z`` transform). Distribution-level equilibrium
tests only need these maps: for feasible sets of distributions, the canonical
device with the identity profile is as expressive as any device.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .constraints import FeasibleSet
from .errors import InputError
from .game import Game, check_distribution, expected_utility
from .numeric import EPS_EQ, promote, tolerance, zeros_like_mode
from .report import EquilibriumReport, Witness


@dataclass(frozen=True)
class DeviationMap:
    player: int
    table: tuple

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(k) for k in self.table))
        if any(not 0 <= k < len(self.table) for k in self.table):
            raise InputError(f"deviation map {self.table} leaves the action set")

    @property
    def is_identity(self) -> bool:
        return all(k == b for b, k in enumerate(self.table))

    def __call__(self, action: int) -> int:
        return self.table[action]

    def label(self, game: Game) -> str:
        acts = game.actions[self.player]
        return ",".join(f"{acts[b]}->{acts[k]}" for b, k in enumerate(self.table))


def all_deviation_maps(game: Game, player) -> list:
    """All ``|A_i| ** |A_i|`` self-maps of the player's action set, lexicographic."""
    player = game.player_index(player)
    n = game.shape[player]
    return [DeviationMap(player, t) for t in itertools.product(range(n), repeat=n)]


def _check_beta(game: Game, beta: DeviationMap):
    if not 0 <= beta.player < game.n_players or len(beta.table) != game.shape[beta.player]:
        raise InputError("deviation map does not match the game")


def deviation_targets(game: Game, beta: DeviationMap) -> np.ndarray:
    """``targets[k]`` is the flat index of profile ``k`` after the player's action is relabeled."""
    _check_beta(game, beta)
    grid = np.indices(game.shape).reshape(game.n_players, -1)
    grid[beta.player] = np.asarray(beta.table)[grid[beta.player]]
    return np.ravel_multi_index(tuple(grid), game.shape)


def deviation_matrix(game: Game, beta: DeviationMap) -> np.ndarray:
    """0/1 matrix ``M`` with ``z_transform(p) = M @ p``."""
    n = game.n_profiles
    M = np.zeros((n, n), dtype=int)
    M[deviation_targets(game, beta), np.arange(n)] = 1
    return M


def z_transform(game: Game, p, beta: DeviationMap) -> np.ndarray:
    """Pushforward of ``p`` under relabeling ``beta`` of one player's coordinate."""
    p = check_distribution(game, p)
    targets = deviation_targets(game, beta)
    z = zeros_like_mode(game.n_profiles, p)
    for k, t in enumerate(targets):
        z[t] = z[t] + p[k]
    return z


def deviated_utility_vector(game: Game, beta: DeviationMap) -> np.ndarray:
    """``v[a] = u_i(beta(a_i), a_-i)``."""
    u = game.payoff_matrix()[:, beta.player]
    return u[deviation_targets(game, beta)]


def expected_utility_after_deviation(game: Game, p, beta: DeviationMap):
    """``sum_a p(a) * u_i(beta(a_i), a_-i)``, computed without forming ``z``."""
    p = check_distribution(game, p)
    v, p = promote(deviated_utility_vector(game, beta), p)
    return p @ v


def is_cce_distribution(game: Game, p, C: FeasibleSet, eps: float = EPS_EQ,
                        stop_at_first: bool = True) -> EquilibriumReport:
    """Whether ``p`` is a constrained correlated equilibrium distribution for ``C``.

    ``p`` must lie in ``C``; then no player may have a deviation map whose
    transformed distribution stays in ``C`` and raises her expected utility.
    """
    p = check_distribution(game, p)
    if not C.contains(p):
        return EquilibriumReport.infeasible("distribution")
    base = expected_utility(game, p)
    tol = tolerance(eps, p, game.payoffs)
    report = EquilibriumReport(True)
    for i in range(game.n_players):
        for beta in all_deviation_maps(game, i):
            if beta.is_identity:
                continue
            z = z_transform(game, p, beta)
            if not C.contains(z):
                continue
            margin = base[i] - expected_utility_after_deviation(game, p, beta)
            report.margins.append(((i, list(beta.table)), margin))
            if margin < -tol:
                if report.verdict:
                    report.witnesses.append(Witness(i, list(beta.table), -margin))
                report.verdict = False
                if stop_at_first:
                    return report
    return report


def cce_mask(game: Game, P, C: FeasibleSet, eps: float = EPS_EQ, in_C=None) -> np.ndarray:
    """Vectorized :func:`is_cce_distribution` over the rows of ``P`` (float or exact)."""
    P = np.asarray(P)
    ok = C.contains_batch(P) if in_C is None else np.array(in_C, dtype=bool)
    U = game.payoff_matrix()
    for i in range(game.n_players):
        ui, X = promote(U[:, i], P)
        tol = tolerance(eps, ui, X)
        base = X @ ui
        for beta in all_deviation_maps(game, i):
            if beta.is_identity:
                continue
            targets = deviation_targets(game, beta)
            Z = zeros_like_mode(X.shape, X)
            for k, t in enumerate(targets):
                Z[:, t] = Z[:, t] + X[:, k]
            feasible = C.contains_batch(Z)
            profitable = X @ ui[targets] - base > tol
            ok &= ~(feasible & profitable)
    return ok


def lipschitz_witness(game: Game, player, beta: DeviationMap, p, p_prime):
    """``(||z(p) - z(p')||, |A_i| * sqrt(|A|) * ||p - p'||)``, as floats."""
    player = game.player_index(player)
    if beta.player != player:
        raise InputError("deviation map belongs to another player")
    zp = np.asarray(z_transform(game, p, beta), dtype=float)
    zq = np.asarray(z_transform(game, p_prime, beta), dtype=float)
    diff = np.asarray(check_distribution(game, p), dtype=float) - np.asarray(check_distribution(game, p_prime), dtype=float)
    lhs = float(np.linalg.norm(zp - zq))
    bound = game.shape[player] * np.sqrt(game.n_profiles) * float(np.linalg.norm(diff))
    return lhs, bound
