"""Classify points of a regular simplex grid into feasible, CE and constrained CE sets.

Grids are produced in lexicographic order of the integer compositions, and
classification keeps that order, so CSV output is reproducible regardless of
thread count.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .canonical import cce_mask
from .constraints import FeasibleSet, linear_feasible
from .equilibrium import ce_mask, ce_polytope
from .errors import CapabilityError, InputError, ResourceError
from .game import Game, expected_utility
from .numeric import format_number, num_threads

DEFAULT_GRID_CAP = 10**7


def grid_size(k: int, m: int) -> int:
    return math.comb(m + k - 1, k - 1)


def _check_grid(k, m, cap):
    if k < 1 or m < 1:
        raise InputError("need at least one profile and resolution m >= 1")
    n = grid_size(k, m)
    if n > cap:
        raise ResourceError(f"grid with k={k}, m={m} has {n} points, cap is {cap}")
    return n


def compositions(k: int, m: int) -> np.ndarray:
    """All ``k``-part compositions of ``m`` as integer rows, lexicographic."""
    if k == 1:
        return np.array([[m]], dtype=np.int64)
    blocks = []
    for first in range(m + 1):
        rest = compositions(k - 1, m - first)
        blocks.append(np.hstack([np.full((len(rest), 1), first, dtype=np.int64), rest]))
    return np.vstack(blocks)


def grid_array(k: int, m: int, cap: int = DEFAULT_GRID_CAP, exact: bool = False) -> np.ndarray:
    """The grid as a ``(C(m+k-1, k-1), k)`` array, float or exact."""
    _check_grid(k, m, cap)
    counts = compositions(k, m)
    if not exact:
        return counts / m
    out = np.empty(counts.shape, dtype=object)
    for idx, c in np.ndenumerate(counts):
        out[idx] = Fraction(int(c), m)
    return out


def simplex_grid(k: int, m: int, cap: int = DEFAULT_GRID_CAP, exact: bool = False):
    """Stream the grid points one at a time, in the same order as :func:`grid_array`."""
    _check_grid(k, m, cap)

    def rec(parts, left, slots):
        if slots == 1:
            yield parts + [left]
            return
        for v in range(left + 1):
            yield from rec(parts + [v], left - v, slots - 1)

    for c in rec([], m, k):
        yield np.array([Fraction(v, m) for v in c], dtype=object) if exact else np.array(c) / m


@dataclass
class ClassificationRecord:
    p: np.ndarray
    in_C: bool
    in_D: bool
    is_CCE: bool
    utilities: np.ndarray
    social_welfare: object


@dataclass
class ClassifiedChunk:
    """Columnar classification results for consecutive grid points."""

    P: np.ndarray
    in_C: np.ndarray
    in_D: np.ndarray
    is_CCE: np.ndarray
    U: np.ndarray

    @property
    def SW(self):
        return self.U.sum(axis=1)

    def __len__(self):
        return len(self.P)

    def records(self):
        sw = self.SW
        for k in range(len(self.P)):
            yield ClassificationRecord(self.P[k], bool(self.in_C[k]), bool(self.in_D[k]),
                                       bool(self.is_CCE[k]), self.U[k], sw[k])


def classify_array(game: Game, C: FeasibleSet, P) -> ClassifiedChunk:
    P = np.asarray(P)
    if P.ndim != 2 or P.shape[1] != game.n_profiles:
        raise InputError(f"grid rows must have {game.n_profiles} coordinates")
    in_C = C.contains_batch(P)
    in_D = ce_mask(game, P)
    is_cce = cce_mask(game, P, C, in_C=in_C)
    bad = in_C & in_D & ~is_cce
    if bad.any():
        raise AssertionError(f"feasible CE point classified as not CCE: {P[np.argmax(bad)]}")
    return ClassifiedChunk(P, in_C, in_D, is_cce, expected_utility(game, P))


def classify(game: Game, C: FeasibleSet, grid, chunk: int = 1 << 16):
    """Yield :class:`ClassifiedChunk` objects over ``grid`` (an array or an iterable of points).

    Chunks are classified on ``CCE_NUM_THREADS`` workers and yielded in grid order.
    """
    if isinstance(grid, np.ndarray):
        pieces = (grid[k:k + chunk] for k in range(0, len(grid), chunk))
    else:
        pieces = _batched(grid, chunk)
    threads = num_threads()
    if threads == 1:
        for piece in pieces:
            yield classify_array(game, C, piece)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        window = []
        for piece in pieces:
            window.append(pool.submit(classify_array, game, C, piece))
            if len(window) >= 2 * threads:
                yield window.pop(0).result()
        for fut in window:
            yield fut.result()


def _batched(points, size):
    buf = []
    for p in points:
        buf.append(p)
        if len(buf) == size:
            yield np.array(buf)
            buf = []
    if buf:
        yield np.array(buf)


def payoff_extremes(chunks) -> dict:
    """Per-class maxima of the symmetric payoff (min over players), per-player payoffs and welfare."""
    classes = ("all", "C", "D", "CCE")
    best = {c: None for c in classes}
    counts = {c: 0 for c in classes}
    n_players = None
    for ch in chunks:
        if isinstance(ch, ClassificationRecord):
            ch = ClassifiedChunk(np.array([ch.p]), np.array([ch.in_C]), np.array([ch.in_D]),
                                 np.array([ch.is_CCE]), np.array([ch.utilities]))
        n_players = ch.U.shape[1]
        masks = {"all": np.ones(len(ch), dtype=bool), "C": ch.in_C, "D": ch.in_D, "CCE": ch.is_CCE}
        sym = ch.U.min(axis=1)
        sw = ch.SW
        for c in classes:
            mask = masks[c]
            counts[c] += int(mask.sum())
            if not mask.any():
                continue
            idx = np.flatnonzero(mask)
            k_sym = idx[np.argmax(sym[idx])]
            cand = {"symmetric": sym[k_sym], "symmetric_point": ch.P[k_sym],
                    "per_player": ch.U[idx].max(axis=0), "sw": sw[idx].max()}
            cur = best[c]
            if cur is None:
                best[c] = cand
            else:
                if cand["symmetric"] > cur["symmetric"]:
                    cur["symmetric"], cur["symmetric_point"] = cand["symmetric"], cand["symmetric_point"]
                cur["per_player"] = np.maximum(cur["per_player"], cand["per_player"])
                cur["sw"] = max(cur["sw"], cand["sw"])
    if n_players is None:
        raise InputError("no records to summarize")
    out = {"counts": counts}
    for c in classes:
        b = best[c]
        key = {"all": "all", "C": "feasible", "D": "ce", "CCE": "cce"}[c]
        if b is None:
            out[f"max_symmetric_{key}_payoff"] = None
            continue
        out[f"max_symmetric_{key}_payoff"] = b["symmetric"]
        out[f"max_symmetric_{key}_point"] = list(b["symmetric_point"])
        out[f"max_{key}_payoff_per_player"] = list(b["per_player"])
        out[f"max_{key}_social_welfare"] = b["sw"]
    return out


def csv_header(game: Game) -> list:
    return ([f"p{label}" for label in game.profile_labels()] + ["in_C", "in_D", "is_CCE"]
            + [f"u_{pl}" for pl in game.players] + ["SW"])


def _cell(v):
    v = format_number(v)
    return repr(v) if isinstance(v, float) else str(v)


def write_rows(ch: ClassifiedChunk, writer) -> None:
    sw = ch.SW
    for k in range(len(ch)):
        writer.writerow([_cell(v) for v in ch.P[k]]
                        + [int(ch.in_C[k]), int(ch.in_D[k]), int(ch.is_CCE[k])]
                        + [_cell(v) for v in ch.U[k]] + [_cell(sw[k])])


def write_csv(game: Game, chunks, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(csv_header(game))
    for ch in chunks:
        write_rows(ch, writer)


def explore(game: Game, C: FeasibleSet, m: int = 60, csv_stream=None, exact: bool = False,
            cap: int = DEFAULT_GRID_CAP) -> dict:
    """Classify the resolution-``m`` grid, optionally streaming CSV rows, and return a summary."""
    grid = grid_array(game.n_profiles, m, cap, exact)
    chunks = classify(game, C, grid)
    if csv_stream is not None:
        writer = csv.writer(csv_stream, lineterminator="\n")
        writer.writerow(csv_header(game))

        def written(source):
            for ch in source:
                write_rows(ch, writer)
                yield ch

        chunks = written(chunks)
    summary = payoff_extremes(chunks)
    return {"game": game.to_dict(), "constraint": C.to_dict(), "resolution": m,
            "points": grid_size(game.n_profiles, m), "exact": exact, **_plain(summary)}


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return format_number(obj) if isinstance(obj, (float, np.floating, Fraction)) else obj


def summary_json(summary: dict) -> str:
    return json.dumps(summary, indent=2, sort_keys=True)


def certify_c_cap_d_empty(game: Game, C: FeasibleSet):
    """Exact linear feasibility test of ``C`` intersected with the CE polytope.

    Returns ``(empty, witness)``; ``witness`` is a rational point of the
    intersection when it is non-empty.
    """
    desc = C.linear()
    if desc is None:
        raise CapabilityError(f"{C.kind} constraint has no linear description")
    G, h, E, f = desc
    Gd, hd, Ed, fd = ce_polytope(game)
    n = game.n_profiles
    GG = np.concatenate([np.asarray(G, dtype=object).reshape(-1, n), Gd])
    hh = np.concatenate([np.asarray(h, dtype=object).reshape(-1), hd.astype(object)])
    EE = np.concatenate([np.asarray(E, dtype=object).reshape(-1, n), Ed.astype(object)])
    ff = np.concatenate([np.asarray(f, dtype=object).reshape(-1), fd.astype(object)])
    point = linear_feasible(GG, hh, EE, ff, n)
    return point is None, point
