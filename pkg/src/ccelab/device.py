"""Correlation devices and extended games.

A device has a finite outcome set, a partition of the outcomes for every
player and a prior ``q``. A (pure) correlated strategy of player ``i`` is a map
from outcomes to actions that is constant on each cell of ``i``'s partition;
we store it as a tuple ``m`` with ``m[w]`` the action index played at outcome
``w``.

Cells are stored as sorted tuples of outcome indices, ordered by their
smallest element. Strategies are enumerated lexicographically over the
per-cell action assignment (cell 0 varies slowest).
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InputError, ResourceError
from .game import Game, check_distribution, check_mixed
from .numeric import (
    EPS_EQ,
    as_array,
    format_number,
    parse_number,
    promote,
    tolerance,
    zeros_like_mode,
)

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class CorrelationDevice:
    outcomes: tuple
    q: np.ndarray = field(repr=False)
    partitions: tuple

    def __post_init__(self):
        outcomes = tuple(self.outcomes)
        if not outcomes or len(set(outcomes)) != len(outcomes):
            raise InputError("outcome labels must be unique and non-empty")
        q = self.q if isinstance(self.q, np.ndarray) else as_array(
            [parse_number(v) if isinstance(v, str) else v for v in self.q])
        q = q.reshape(-1)
        if q.shape[0] != len(outcomes):
            raise InputError("q needs one weight per outcome")
        tol = tolerance(1e-9, q)
        if any(v < -tol for v in q) or abs(sum(q) - 1) > tol:
            raise InputError("q is not a probability vector")
        parts = []
        for cells in self.partitions:
            cells = [tuple(sorted(self._outcome_index(outcomes, w) for w in cell)) for cell in cells]
            seen = sorted(w for cell in cells for w in cell)
            if any(not cell for cell in cells) or seen != list(range(len(outcomes))):
                raise InputError("each partition must split the outcomes into disjoint non-empty cells")
            parts.append(tuple(sorted(cells)))
        q = q.copy()
        q.flags.writeable = False
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "partitions", tuple(parts))

    @staticmethod
    def _outcome_index(outcomes, w):
        if w in outcomes:
            return outcomes.index(w)
        if isinstance(w, (int, np.integer)) and 0 <= w < len(outcomes):
            return int(w)
        raise InputError(f"unknown outcome {w!r}")

    @property
    def n_outcomes(self) -> int:
        return len(self.outcomes)

    def n_cells(self, player: int) -> int:
        return len(self.partitions[player])

    def cell_of(self, player: int) -> np.ndarray:
        """``cell_of(i)[w]`` is the index of the cell of player ``i`` containing outcome ``w``."""
        out = np.empty(self.n_outcomes, dtype=int)
        for c, cell in enumerate(self.partitions[player]):
            out[list(cell)] = c
        return out

    def to_dict(self) -> dict:
        return {"outcomes": list(self.outcomes),
                "q": [format_number(v) for v in self.q],
                "partitions": [[[self.outcomes[w] for w in cell] for cell in cells]
                               for cells in self.partitions]}

    @classmethod
    def from_dict(cls, data: dict) -> "CorrelationDevice":
        try:
            return cls(data["outcomes"], data["q"], data["partitions"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"device JSON missing field: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "CorrelationDevice":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid device JSON: {exc}") from exc

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def trivial_device(n_players: int) -> CorrelationDevice:
    """Single-outcome device: no correlation at all."""
    return CorrelationDevice(("w",), [1], [[["w"]]] * n_players)


def check_measurable(device: CorrelationDevice, player: int, amap, n_actions: int) -> tuple:
    amap = tuple(int(k) for k in amap)
    if len(amap) != device.n_outcomes:
        raise InputError(f"strategy of player {player} must assign an action to every outcome")
    if any(not 0 <= k < n_actions for k in amap):
        raise InputError(f"strategy of player {player} uses an out-of-range action")
    for cell in device.partitions[player]:
        if len({amap[w] for w in cell}) > 1:
            raise InputError(f"strategy of player {player} is not constant on cell {cell}")
    return amap


@dataclass(frozen=True)
class CorrelatedProfile:
    """One measurable outcome-to-action map per player.

    Build through :func:`make_profile` to have measurability checked.
    """

    maps: tuple

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(tuple(int(k) for k in m) for m in self.maps))

    def at(self, w: int) -> tuple:
        return tuple(m[w] for m in self.maps)

    def replace(self, player: int, amap) -> "CorrelatedProfile":
        maps = list(self.maps)
        maps[player] = tuple(amap)
        return CorrelatedProfile(tuple(maps))


def make_profile(game: Game, device: CorrelationDevice, maps) -> CorrelatedProfile:
    if len(maps) != game.n_players:
        raise InputError("need one strategy per player")
    return CorrelatedProfile(tuple(check_measurable(device, i, m, game.shape[i]) for i, m in enumerate(maps)))


def profile_from_cells(game: Game, device: CorrelationDevice, assignments) -> CorrelatedProfile:
    """Profile from per-player lists giving the action index played on each cell."""
    maps = []
    for i, assign in enumerate(assignments):
        if len(assign) != device.n_cells(i):
            raise InputError(f"player {i} needs one action per cell")
        maps.append(tuple(assign[c] for c in device.cell_of(i)))
    return make_profile(game, device, maps)


def check_profile_for(game: Game, device: CorrelationDevice, profile) -> CorrelatedProfile:
    if isinstance(profile, CorrelatedProfile):
        maps = profile.maps
    else:
        maps = profile
    return make_profile(game, device, maps)


def strategy_count(device: CorrelationDevice, game: Game, player: int) -> int:
    return game.shape[player] ** device.n_cells(player)


def enumerate_strategies(device: CorrelationDevice, game: Game, player, cap: int = DEFAULT_CAP) -> list:
    """All measurable maps of ``player``, lexicographic in the per-cell assignment."""
    player = game.player_index(player)
    count = strategy_count(device, game, player)
    if count > cap:
        raise ResourceError(f"player {player} has {count} strategies, cap is {cap}")
    cell_of = device.cell_of(player)
    return [tuple(assign[c] for c in cell_of)
            for assign in itertools.product(range(game.shape[player]), repeat=device.n_cells(player))]


def strategy_label(game: Game, device: CorrelationDevice, player: int, amap) -> str:
    """Human-readable form such as ``"H:P | M,L:A"``."""
    parts = []
    for cell in device.partitions[player]:
        names = ",".join(str(device.outcomes[w]) for w in cell)
        parts.append(f"{names}:{game.actions[player][amap[cell[0]]]}")
    return " | ".join(parts)


def profile_distribution(game: Game, device: CorrelationDevice, profile) -> np.ndarray:
    """Distribution over action profiles induced by a pure correlated profile."""
    profile = check_profile_for(game, device, profile)
    return _distribution(game, device, profile.maps)


def _distribution(game: Game, device: CorrelationDevice, maps) -> np.ndarray:
    p = zeros_like_mode(game.n_profiles, device.q)
    idx = np.ravel_multi_index(tuple(np.asarray(m) for m in maps), game.shape)
    for w, k in enumerate(idx):
        p[k] = p[k] + device.q[w]
    return p


def profile_utility(game: Game, device: CorrelationDevice, maps) -> np.ndarray:
    """Extended-game utility vector: sum over outcomes of ``q(w) * u(alpha(w))``."""
    maps = maps.maps if isinstance(maps, CorrelatedProfile) else maps
    u, q = promote(game.payoffs, device.q)
    rows = u[tuple(np.asarray(m) for m in maps)]
    return q @ rows


@dataclass(frozen=True)
class ExtendedGame:
    """Normal-form game whose strategies are the measurable maps of a device."""

    game: Game
    base: Game = field(repr=False)
    device: CorrelationDevice = field(repr=False)
    strategies: tuple = field(repr=False)

    def profile(self, indices) -> CorrelatedProfile:
        return CorrelatedProfile(tuple(self.strategies[i][k] for i, k in enumerate(indices)))

    def indices(self, profile) -> tuple:
        maps = profile.maps if isinstance(profile, CorrelatedProfile) else profile
        return tuple(self.strategies[i].index(tuple(m)) for i, m in enumerate(maps))

    def to_dict(self) -> dict:
        out = self.game.to_dict()
        out["strategies"] = [
            [{str(self.device.outcomes[w]): self.base.actions[i][m[w]] for w in range(self.device.n_outcomes)}
             for m in strats]
            for i, strats in enumerate(self.strategies)]
        out["strategy_labels"] = [[strategy_label(self.base, self.device, i, m) for m in strats]
                                  for i, strats in enumerate(self.strategies)]
        return out


def extend(game: Game, device: CorrelationDevice, cap: int = DEFAULT_CAP) -> ExtendedGame:
    """Materialize the extended game of ``game`` by ``device``."""
    if len(device.partitions) != game.n_players:
        raise InputError("device needs one partition per player")
    counts = [strategy_count(device, game, i) for i in range(game.n_players)]
    total = math.prod(counts)
    if total > cap:
        raise ResourceError(f"extended game has {total} joint strategies, cap is {cap}")
    strategies = tuple(tuple(enumerate_strategies(device, game, i, cap)) for i in range(game.n_players))
    n = game.n_players
    index = []
    for i, strats in enumerate(strategies):
        arr = np.asarray(strats, dtype=int)
        shape = [1] * n + [device.n_outcomes]
        shape[i] = len(strats)
        index.append(arr.reshape(shape))
    u, q = promote(game.payoffs, device.q)
    per_outcome = u[tuple(index)]  # (K_1, ..., K_n, |Omega|, n)
    payoffs = (per_outcome * q.reshape([1] * n + [-1, 1])).sum(axis=n)
    labels = [tuple(f"s{k + 1}" for k in range(len(s))) for s in strategies]
    ext = Game(game.players, labels, payoffs)
    return ExtendedGame(ext, game, device, strategies)


def canonical_device(game: Game, p) -> CorrelationDevice:
    """Device whose outcomes are the action profiles, with prior ``p``; each player sees her own coordinate."""
    p = check_distribution(game, p)
    profiles = game.profiles()
    labels = game.profile_labels()
    partitions = []
    for i in range(game.n_players):
        partitions.append([[w for w, a in enumerate(profiles) if a[i] == k] for k in range(game.shape[i])])
    return CorrelationDevice(labels, p, partitions)


def identity_profile(game: Game) -> CorrelatedProfile:
    """Each player plays the recommended coordinate of the canonical device outcome."""
    profiles = game.profiles()
    return CorrelatedProfile(tuple(tuple(a[i] for a in profiles) for i in range(game.n_players)))


def compose(beta, amap) -> tuple:
    """``beta`` applied after an outcome-to-action map."""
    return tuple(beta[k] for k in amap)


# Mixed correlated strategies ------------------------------------------------


@dataclass(frozen=True)
class MixedCorrelatedProfile:
    """Per-player arrays of shape ``(|Omega|, |A_i|)``; row ``w`` is the mixed action at outcome ``w``."""

    maps: tuple

    def replace(self, player: int, gamma) -> "MixedCorrelatedProfile":
        maps = list(self.maps)
        maps[player] = gamma
        return MixedCorrelatedProfile(tuple(maps))


def check_mixed_map(device: CorrelationDevice, player: int, gamma, n_actions: int) -> np.ndarray:
    if not isinstance(gamma, np.ndarray):
        gamma = as_array([[parse_number(v) if isinstance(v, str) else v for v in row] for row in gamma])
    if gamma.shape != (device.n_outcomes, n_actions):
        raise InputError(f"mixed strategy of player {player} has shape {gamma.shape}")
    for w in range(device.n_outcomes):
        check_mixed(gamma[w], n_actions)
    tol = tolerance(EPS_EQ, gamma)
    for cell in device.partitions[player]:
        first = gamma[cell[0]]
        for w in cell[1:]:
            if any(abs(x - y) > tol for x, y in zip(gamma[w], first)):
                raise InputError(f"mixed strategy of player {player} is not constant on cell {cell}")
    return gamma


def make_mixed_profile(game: Game, device: CorrelationDevice, maps) -> MixedCorrelatedProfile:
    if len(maps) != game.n_players:
        raise InputError("need one mixed strategy per player")
    return MixedCorrelatedProfile(tuple(check_mixed_map(device, i, g, game.shape[i]) for i, g in enumerate(maps)))


def constant_mixed(device: CorrelationDevice, mixed_action) -> np.ndarray:
    """Mixed correlated strategy that ignores the outcome."""
    row = as_array([parse_number(v) if isinstance(v, str) else v for v in mixed_action])
    return np.stack([row] * device.n_outcomes)


def pure_as_mixed(game: Game, profile: CorrelatedProfile) -> MixedCorrelatedProfile:
    maps = []
    for i, m in enumerate(profile.maps):
        g = np.empty((len(m), game.shape[i]), dtype=object)
        g.fill(Fraction(0))
        for w, k in enumerate(m):
            g[w, k] = Fraction(1)
        maps.append(g)
    return MixedCorrelatedProfile(tuple(maps))


def induced_distribution(game: Game, device: CorrelationDevice, mixed) -> np.ndarray:
    """``p(a) = sum_w q(w) * prod_j gamma_j(w)(a_j)``."""
    if not isinstance(mixed, MixedCorrelatedProfile):
        mixed = make_mixed_profile(game, device, mixed)
    arrays = promote(device.q, *mixed.maps)
    q, gammas = arrays[0], arrays[1:]
    total = zeros_like_mode(game.n_profiles, q)
    for w in range(device.n_outcomes):
        joint = gammas[0][w]
        for g in gammas[1:]:
            joint = np.multiply.outer(joint, g[w])
        total = total + q[w] * np.asarray(joint).reshape(-1)
    return total


def derandomize(game: Game, device: CorrelationDevice, mixed):
    """Canonical device and identity profile reproducing the distribution induced by ``mixed``."""
    p = induced_distribution(game, device, mixed)
    return canonical_device(game, p), identity_profile(game)


def lift_deviation(game: Game, device: CorrelationDevice, mixed, player, canonical_map) -> MixedCorrelatedProfile:
    """Mixed deviation on ``device`` matching a deviation on the derandomized canonical device.

    ``canonical_map`` is a strategy of ``player`` on the canonical device (a tuple
    indexed by profiles). Being measurable, it depends on the recommended action
    only, so it is read at the first profile of each cell.
    """
    player = game.player_index(player)
    if not isinstance(mixed, MixedCorrelatedProfile):
        mixed = make_mixed_profile(game, device, mixed)
    canon = canonical_device(game, np.full(game.n_profiles, Fraction(1, game.n_profiles), dtype=object))
    amap = check_measurable(canon, player, canonical_map, game.shape[player])
    beta = [amap[cell[0]] for cell in canon.partitions[player]]
    gamma = mixed.maps[player]
    new = zeros_like_mode(gamma.shape, gamma)
    for b, target in enumerate(beta):
        new[:, target] = new[:, target] + gamma[:, b]
    return mixed.replace(player, new)


def mixed_utility(game: Game, device: CorrelationDevice, mixed) -> np.ndarray:
    """Expected utility vector of a mixed correlated profile."""
    p = induced_distribution(game, device, mixed)
    u, p = promote(game.payoff_matrix(), p)
    return p @ u


# Small-device enumeration -------------------------------------------------------


def set_partitions(n: int):
    """All partitions of ``range(n)`` into cells (restricted growth strings, lexicographic)."""

    def rec(k, labels, used):
        if k == n:
            yield tuple(tuple(w for w in range(n) if labels[w] == c) for c in range(used))
            return
        for c in range(used + 1):
            yield from rec(k + 1, labels + [c], max(used, c + 1))

    yield from rec(0, [], 0)


def enumerate_devices(n_players: int, n_outcomes: int, priors):
    """Every device on ``n_outcomes`` outcomes with any per-player partitions, for each prior in ``priors``."""
    parts = list(set_partitions(n_outcomes))
    labels = tuple(f"w{k}" for k in range(n_outcomes))
    for q in priors:
        for combo in itertools.product(parts, repeat=n_players):
            yield CorrelationDevice(labels, q, combo)
