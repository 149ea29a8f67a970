"""Finite normal-form games and distributions over action profiles.

Profiles are indexed in row-major order over the per-player action lists, so a
distribution over a game with action counts ``(n_1, ..., n_k)`` is a flat
vector of length ``n_1 * ... * n_k`` whose entry ``np.ravel_multi_index(a, shape)``
is the probability of profile ``a``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InputError
from .numeric import (
    EPS_EQ,
    EPS_SUM,
    as_array,
    format_number,
    is_exact,
    parse_number,
    promote,
    tolerance,
)


@dataclass(frozen=True)
class Game:
    """A finite game in normal form.

    ``payoffs`` has shape ``(|A_1|, ..., |A_n|, n)``; ``payoffs[a][i]`` is
    player ``i``'s utility at profile ``a``.
    """

    players: tuple
    actions: tuple
    payoffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        players = tuple(self.players)
        actions = tuple(tuple(a) for a in self.actions)
        payoffs = self.payoffs if isinstance(self.payoffs, np.ndarray) else as_array(self.payoffs)
        if len(set(players)) != len(players):
            raise InputError("player ids must be unique")
        if len(actions) != len(players):
            raise InputError("need one action list per player")
        for acts in actions:
            if not acts:
                raise InputError("every player needs at least one action")
            if len(set(acts)) != len(acts):
                raise InputError("action labels must be unique per player")
        expected = tuple(len(a) for a in actions) + (len(players),)
        if payoffs.shape != expected:
            raise InputError(f"payoff tensor has shape {payoffs.shape}, expected {expected}")
        payoffs = payoffs.copy()
        payoffs.flags.writeable = False
        object.__setattr__(self, "players", players)
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "payoffs", payoffs)

    @property
    def n_players(self) -> int:
        return len(self.players)

    @property
    def shape(self) -> tuple:
        return tuple(len(a) for a in self.actions)

    @property
    def n_profiles(self) -> int:
        return int(np.prod(self.shape))

    @property
    def exact(self) -> bool:
        return is_exact(self.payoffs)

    def profiles(self):
        """All action profiles in row-major order."""
        return list(itertools.product(*(range(n) for n in self.shape)))

    def profile_index(self, profile) -> int:
        return int(np.ravel_multi_index(tuple(profile), self.shape))

    def profile_labels(self) -> list:
        return ["(" + ",".join(self.actions[i][k] for i, k in enumerate(a)) + ")" for a in self.profiles()]

    def action_index(self, player, label) -> int:
        try:
            return self.actions[player].index(label)
        except ValueError:
            raise InputError(f"unknown action {label!r} for player {player}") from None

    def player_index(self, player) -> int:
        if isinstance(player, (int, np.integer)) and 0 <= player < self.n_players:
            return int(player)
        if player in self.players:
            return self.players.index(player)
        raise InputError(f"unknown player {player!r}")

    def payoff_matrix(self) -> np.ndarray:
        """Utilities as a ``(n_profiles, n_players)`` array."""
        return self.payoffs.reshape(self.n_profiles, self.n_players)

    def welfare_vector(self) -> np.ndarray:
        """Social welfare (sum of utilities) at each profile."""
        return self.payoff_matrix().sum(axis=1)

    # JSON --------------------------------------------------------------

    def to_dict(self) -> dict:
        nested = np.empty(self.shape, dtype=object)
        for a in self.profiles():
            nested[a] = [format_number(v) for v in self.payoffs[a]]
        return {"players": list(self.players), "actions": [list(a) for a in self.actions],
                "payoffs": nested.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Game":
        try:
            players, actions, raw = data["players"], data["actions"], data["payoffs"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"game JSON missing field: {exc}") from exc
        shape = tuple(len(a) for a in actions)

        def leaves(node, depth):
            if depth == len(shape):
                if not isinstance(node, list) or len(node) != len(players):
                    raise InputError("each payoff leaf must list one value per player")
                return [[parse_number(v) for v in node]]
            if not isinstance(node, list) or len(node) != shape[depth]:
                raise InputError("payoff nesting does not match action counts")
            return [leaf for child in node for leaf in leaves(child, depth + 1)]

        flat = leaves(raw, 0)
        payoffs = as_array(flat).reshape(shape + (len(players),))
        return cls(players, actions, payoffs)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "Game":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid game JSON: {exc}") from exc
        return cls.from_dict(data)


def make_game(table, actions, players=None) -> Game:
    """Build a game from a nested list of payoff tuples (``table[a_1][a_2]...``)."""
    shape = tuple(len(a) for a in actions)
    n = len(actions)
    payoffs = as_array(table)
    if payoffs.shape != shape + (n,):
        raise InputError(f"payoff table has shape {payoffs.shape}, expected {shape + (n,)}")
    return Game(tuple(players or (str(k) for k in range(1, n + 1))), actions, payoffs)


def check_profile(game: Game, profile) -> tuple:
    profile = tuple(int(k) for k in profile)
    if len(profile) != game.n_players:
        raise InputError(f"profile {profile} has wrong length")
    for i, k in enumerate(profile):
        if not 0 <= k < game.shape[i]:
            raise InputError(f"action index {k} out of range for player {i}")
    return profile


def check_distribution(game: Game, p, eps: float = EPS_SUM) -> np.ndarray:
    """Validate ``p`` as a distribution over ``game``'s profiles and return it as an array.

    Lists of ints/Fractions/``"p/q"`` strings produce exact arrays.
    """
    if not isinstance(p, np.ndarray):
        p = as_array([parse_number(v) if isinstance(v, str) else v for v in np.ravel(p)])
    p = p.reshape(-1)
    if p.shape[0] != game.n_profiles:
        raise InputError(f"distribution has {p.shape[0]} entries, game has {game.n_profiles} profiles")
    tol = tolerance(eps, p)
    if any(v < -tol for v in p):
        raise InputError("distribution has negative weights")
    if abs(sum(p) - 1) > tol:
        raise InputError(f"distribution sums to {float(sum(p))!r}, not 1")
    return p


def point_mass(game: Game, profile, exact: bool = True) -> np.ndarray:
    profile = check_profile(game, profile)
    p = np.empty(game.n_profiles, dtype=object) if exact else np.zeros(game.n_profiles)
    if exact:
        p.fill(Fraction(0))
    p[game.profile_index(profile)] = Fraction(1) if exact else 1.0
    return p


def utility(game: Game, profile) -> np.ndarray:
    """Utility vector ``(u_1(a), ..., u_n(a))`` at a pure profile."""
    return game.payoffs[check_profile(game, profile)].copy()


def expected_utility(game: Game, p) -> np.ndarray:
    """Per-player expected utility under a distribution over profiles."""
    p = np.asarray(p)
    if p.shape[-1:] != (game.n_profiles,):
        raise InputError(f"distribution has {p.shape[-1:]} entries, game has {game.n_profiles} profiles")
    u, p = promote(game.payoff_matrix(), p)
    return p @ u


def social_welfare(game: Game, p):
    return expected_utility(game, p).sum(axis=-1)


def product_distribution(game: Game, mixed) -> np.ndarray:
    """Distribution of independent play under a mixed profile (one probability vector per player)."""
    if len(mixed) != game.n_players:
        raise InputError("need one mixed strategy per player")
    vectors = []
    for i, m in enumerate(mixed):
        m = check_mixed(m, game.shape[i])
        vectors.append(m)
    vectors = promote(*vectors)
    out = vectors[0]
    for v in vectors[1:]:
        out = np.multiply.outer(out, v)
    return np.asarray(out).reshape(-1)


def check_mixed(m, n_actions: int, eps: float = EPS_SUM) -> np.ndarray:
    if not isinstance(m, np.ndarray):
        m = as_array([parse_number(v) if isinstance(v, str) else v for v in m])
    if m.shape != (n_actions,):
        raise InputError(f"mixed strategy has {m.shape} entries, expected {n_actions}")
    tol = tolerance(eps, m)
    if any(v < -tol for v in m) or abs(sum(m) - 1) > tol:
        raise InputError("mixed strategy is not a probability vector")
    return m


def deviation_gains(game: Game, profile) -> list:
    """For each player, the best gain from a unilateral pure deviation and the deviating action."""
    profile = check_profile(game, profile)
    out = []
    for i in range(game.n_players):
        here = game.payoffs[profile][i]
        best_gain, best_action = 0, None
        for k in range(game.shape[i]):
            alt = list(profile)
            alt[i] = k
            gain = game.payoffs[tuple(alt)][i] - here
            if gain > best_gain:
                best_gain, best_action = gain, k
        out.append((best_gain, best_action))
    return out


def pure_nash_equilibria(game: Game, eps: float = EPS_EQ) -> list:
    """Pure profiles where no player gains more than ``eps`` by deviating, in lexicographic order."""
    tol = tolerance(eps, game.payoffs)
    return [a for a in game.profiles() if all(g <= tol for g, _ in deviation_gains(game, a))]
