"""Gain functions, the existence self-map ``g`` on ``C``, and a damped iteration.

For a distribution ``p`` in a convex closed ``C``, every deviation map whose
transformed distribution stays in ``C`` contributes its positive gain ``phi``;
``g(p)`` shifts mass from ``p`` toward each such ``z`` in proportion to
``phi / (1 + sum phi)``. Fixed points of ``g`` are exactly the distributions
with no feasible profitable deviation, which is what the tests check
empirically on grids.
"""
from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .canonical import (
    DeviationMap,
    all_deviation_maps,
    deviation_targets,
    expected_utility_after_deviation,
    is_cce_distribution,
    z_transform,
)
from .constraints import FeasibleSet
from .errors import CapabilityError, DomainError, InputError
from .game import Game, check_distribution, expected_utility
from .numeric import format_number, num_threads, promote, to_float

log = logging.getLogger(__name__)


def _require_convex_closed(C: FeasibleSet):
    if not C.convex:
        raise CapabilityError(f"{C.kind} constraint is not convex; g is only defined on convex C")
    if not C.closed:
        raise CapabilityError(f"{C.kind} constraint is not closed; g is only defined on compact C")


def phi(game: Game, p, beta: DeviationMap, C: FeasibleSet):
    """Positive part of the gain from ``beta``; ``beta`` must keep the distribution in ``C``."""
    p = check_distribution(game, p)
    if not C.contains(z_transform(game, p, beta)):
        raise DomainError(f"deviation {beta.table} of player {beta.player} leaves C")
    gain = expected_utility_after_deviation(game, p, beta) - expected_utility(game, p)[beta.player]
    return gain if gain > 0 else gain * 0


@dataclass
class GMapEvaluation:
    point: np.ndarray
    phi: dict
    output: np.ndarray
    residual: float
    feasible: dict = field(default_factory=dict)

    def weights(self):
        """Coefficients of the convex combination: the one on ``p`` first, then one per ``phi`` entry."""
        total = sum(self.phi.values())
        return [1 - total / (1 + total)] + [v / (1 + total) for v in self.phi.values()]


def feasible_maps(game: Game, p, C: FeasibleSet) -> dict:
    """``H_i(p)`` for every player: non-identity maps whose transform stays in ``C``."""
    out = {}
    for i in range(game.n_players):
        out[i] = tuple(beta.table for beta in all_deviation_maps(game, i)
                       if not beta.is_identity and C.contains(z_transform(game, p, beta)))
    return out


def g_map(game: Game, p, C: FeasibleSet) -> GMapEvaluation:
    """Evaluate ``g`` at ``p``; exact inputs give an exact output."""
    _require_convex_closed(C)
    p = check_distribution(game, p)
    if not C.contains(p):
        raise DomainError("g is defined on C only; the point lies outside")
    base = expected_utility(game, p)
    phis, zs, H = {}, {}, {}
    for i in range(game.n_players):
        H[i] = []
        for beta in all_deviation_maps(game, i):
            if beta.is_identity:
                continue
            z = z_transform(game, p, beta)
            if not C.contains(z):
                continue
            H[i].append(beta.table)
            gain = expected_utility_after_deviation(game, p, beta) - base[i]
            phis[(i, beta.table)] = gain if gain > 0 else gain * 0
            zs[(i, beta.table)] = z
        H[i] = tuple(H[i])
    total = sum(phis.values()) if phis else 0
    out = p * (1 - total / (1 + total))
    for key, v in phis.items():
        if v:
            z, out = promote(zs[key], out)
            out = out + z * (v / (1 + total))
    diff = out - p
    sq = sum(d * d for d in diff)
    return GMapEvaluation(p, phis, out, math.sqrt(float(sq)), H)


def residual(game: Game, p, C: FeasibleSet) -> float:
    return g_map(game, p, C).residual


def residual_batch(game: Game, P, C: FeasibleSet) -> np.ndarray:
    """Float residuals ``||g(p) - p||`` for the rows of ``P`` (all assumed to lie in ``C``)."""
    _require_convex_closed(C)
    X = np.asarray(to_float(np.asarray(P)), dtype=float)
    U = np.asarray(to_float(game.payoff_matrix()), dtype=float)
    base = X @ U
    phis, shifts = [], []
    for i in range(game.n_players):
        for beta in all_deviation_maps(game, i):
            if beta.is_identity:
                continue
            t = deviation_targets(game, beta)
            Z = np.zeros_like(X)
            np.add.at(Z.T, t, X.T)
            feasible = C.contains_batch(Z)
            gain = X @ U[t, i] - base[:, i]
            phis.append(np.where(feasible, np.maximum(gain, 0.0), 0.0))
            shifts.append(Z - X)
    if not phis:
        return np.zeros(X.shape[0])
    F = np.stack(phis, axis=1)
    W = F / (1 + F.sum(axis=1, keepdims=True))
    D = np.einsum("nk,knj->nj", W, np.stack(shifts))
    return np.linalg.norm(D, axis=1)


# Iteration -------------------------------------------------------------------


@dataclass
class FixedPointResult:
    point: np.ndarray
    residual: float
    converged: bool
    iterations: int
    starts_used: int = 1
    h_changes: int = 0

    def to_dict(self) -> dict:
        return {"point": [format_number(v) for v in self.point], "residual": self.residual,
                "converged": self.converged, "iterations": self.iterations,
                "starts_used": self.starts_used}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


class _FloatG:
    """Float evaluation of ``g`` with the deviation structure precomputed."""

    def __init__(self, game: Game, C: FeasibleSet):
        self.C = C
        U = np.asarray(to_float(game.payoff_matrix()), dtype=float)
        self.U = U
        self.players, self.targets, self.dev_u = [], [], []
        for i in range(game.n_players):
            for beta in all_deviation_maps(game, i):
                if beta.is_identity:
                    continue
                t = deviation_targets(game, beta)
                self.players.append(i)
                self.targets.append(t)
                self.dev_u.append(U[t, i])
        self.players = np.array(self.players, dtype=int)
        n = game.n_profiles
        # M[k] maps p to z for deviation k
        self.M = np.zeros((len(self.targets), n, n))
        for k, t in enumerate(self.targets):
            self.M[k, t, np.arange(n)] = 1.0
        self.dev_u = np.array(self.dev_u).reshape(len(self.targets), n)

    def __call__(self, p):
        if not len(self.targets):
            return p.copy(), 0.0, np.zeros(0, dtype=bool)
        Z = self.M @ p
        feasible = self.C.contains_batch(Z)
        base = p @ self.U
        gain = self.dev_u @ p - base[self.players]
        ph = np.where(feasible, np.maximum(gain, 0.0), 0.0)
        total = ph.sum()
        out = p / (1 + total) + (ph / (1 + total)) @ Z
        return out, float(np.linalg.norm(out - p)), feasible


def find_fixed_point(game: Game, C: FeasibleSet, start, damping: float = 1.0,
                     max_iter: int = 10_000, tol: float = 1e-8) -> FixedPointResult:
    """Damped iteration ``p <- (1 - damping) p + damping g(p)`` from ``start``.

    Returns the first iterate with residual below ``tol`` that also passes
    :func:`is_cce_distribution`; otherwise the best
    iterate seen, flagged ``converged=False``. Iterates are floats.
    """
    _require_convex_closed(C)
    if not 0 < damping <= 1:
        raise InputError("damping must lie in (0, 1]")
    start = check_distribution(game, start)
    if not C.contains(start):
        raise InputError("start distribution is not in C")
    g = _FloatG(game, C)
    p = np.asarray(to_float(start), dtype=float)
    best = (math.inf, p, 0)
    prev_h, changes = None, 0
    for it in range(max_iter + 1):
        out, res, feasible = g(p)
        if prev_h is not None and not np.array_equal(feasible, prev_h):
            changes += 1
            log.debug("iteration %d: feasible deviation sets changed", it)
        prev_h = feasible
        if res < best[0]:
            best = (res, p, it)
        # residual and margins live on different scales; a point is only
        # reported as converged once the equilibrium check agrees
        if res < tol and is_cce_distribution(game, p, C).verdict:
            return FixedPointResult(p, res, True, it, h_changes=changes)
        if it == max_iter:
            break
        nxt = np.clip((1 - damping) * p + damping * out, 0.0, None)
        p = nxt / nxt.sum()
    return FixedPointResult(best[1], best[0], False, best[2], h_changes=changes)


def _samples_in_C(game: Game, C: FeasibleSet, rng, n=4096):
    S = rng.dirichlet(np.ones(game.n_profiles), size=n)
    inside = S[C.contains_batch(S)]
    if len(inside):
        return inside
    desc = C.linear()
    if desc is not None:
        from .constraints import linear_feasible, simplex_rows
        G, h, E, f = desc
        E1, f1 = simplex_rows(game.n_profiles)
        pt = linear_feasible(G, h, np.concatenate([E, E1]) if len(E) else E1,
                             np.concatenate([f, f1]) if len(f) else f1, game.n_profiles)
        if pt is not None:
            return np.array([[float(v) for v in pt]])
    raise InputError("could not find any point of C; it may be empty")


def starting_points(game: Game, C: FeasibleSet, n_starts: int = 16, seed: int = 0) -> list:
    """Projected vertices first, then random feasible points, ``n_starts`` in total."""
    rng = np.random.default_rng(seed)
    samples = _samples_in_C(game, C, rng)
    center = samples.mean(axis=0)
    if not C.contains(center):
        center = samples[0]
    starts = []
    for k in range(game.n_profiles):
        vertex = np.zeros(game.n_profiles)
        vertex[k] = 1.0
        if C.contains(vertex):
            starts.append(vertex)
            continue
        lo, hi = 0.0, 1.0  # weight on the center; hi is always feasible
        for _ in range(60):
            mid = (lo + hi) / 2
            if C.contains((1 - mid) * vertex + mid * center):
                hi = mid
            else:
                lo = mid
        starts.append((1 - hi) * vertex + hi * center)
    starts = starts[:n_starts]
    while len(starts) < n_starts:
        starts.append(samples[rng.integers(len(samples))])
    return starts


def multi_start(game: Game, C: FeasibleSet, n_starts: int = 16, seed: int = 0, damping: float = 1.0,
                max_iter: int = 10_000, tol: float = 1e-8) -> FixedPointResult:
    """Run :func:`find_fixed_point` from several starts; keep the first converged run in start order.

    ``starts_used`` counts the starts up to and including the chosen one.
    """
    _require_convex_closed(C)
    starts = starting_points(game, C, n_starts, seed)

    def run(s):
        return find_fixed_point(game, C, s, damping, max_iter, tol)

    # batches of size ``threads``; stopping after the first batch holding a
    # converged run keeps the pick independent of the thread count
    threads = num_threads()
    results = []
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for k in range(0, len(starts), threads):
            results.extend(pool.map(run, starts[k:k + threads]))
            if any(r.converged for r in results):
                break
    done = [k for k, r in enumerate(results) if r.converged]
    if done:
        pick = results[done[0]]
        pick.starts_used = done[0] + 1
    else:
        pick = min(results, key=lambda r: r.residual)
        pick.starts_used = len(results)
    return pick
