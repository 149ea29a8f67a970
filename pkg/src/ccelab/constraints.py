"""Feasible sets of distributions over action profiles.

A feasible set is a membership oracle on the simplex. Kinds with a linear
description expose it as ``G p >= h`` and ``E p = f`` (both possibly empty),
which :func:`linear_feasible` and the explorer use for exact emptiness
certificates.

Closed constraints are tested with slack ``EPS_C``; the strict constraint
``p(a) > 0`` is tested as ``p(a) >= EPS_OPEN``. Exact inputs are tested with no
slack at all.
"""
from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .errors import InputError
from .game import Game
from .numeric import (
    EPS_C,
    EPS_OPEN,
    as_array,
    format_number,
    is_exact,
    parse_number,
    promote,
    to_fraction_array,
    tolerance,
)


class FeasibleSet:
    """Base class; subclasses implement :meth:`_mask`."""

    kind = "abstract"
    convex = True
    closed = True

    def __init__(self, n_profiles: int):
        self.n_profiles = int(n_profiles)

    def linear(self):
        """``(G, h, E, f)`` with membership ``G p >= h, E p = f``, or None when not polyhedral."""
        return None

    def contains(self, p) -> bool:
        p = np.asarray(p)
        if p.shape != (self.n_profiles,):
            raise InputError(f"distribution has shape {p.shape}, expected ({self.n_profiles},)")
        return bool(self._mask(p.reshape(1, -1))[0])

    def contains_batch(self, P) -> np.ndarray:
        """Vectorized membership for a ``(N, n_profiles)`` array of distributions."""
        P = np.asarray(P)
        if P.ndim != 2 or P.shape[1] != self.n_profiles:
            raise InputError(f"batch has shape {P.shape}, expected (N, {self.n_profiles})")
        return self._mask(P)

    def _mask(self, P) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": self.params()}

    def __and__(self, other):
        return intersection(self, other)

    def __repr__(self):
        return f"{type(self).__name__}({self.params()})"


class FullSimplex(FeasibleSet):
    kind = "full"

    def linear(self):
        return _empty_linear(self.n_profiles)

    def _mask(self, P):
        return np.ones(P.shape[0], dtype=bool)


class LinearSet(FeasibleSet):
    """``{p : G p >= h, E p = f}`` over the row-major profile ordering."""

    kind = "linear"

    def __init__(self, n_profiles, G=None, h=None, E=None, f=None):
        super().__init__(n_profiles)
        self.G, self.h = _rows(G, h, n_profiles)
        self.E, self.f = _rows(E, f, n_profiles)

    def linear(self):
        return self.G, self.h, self.E, self.f

    def _mask(self, P):
        ok = np.ones(P.shape[0], dtype=bool)
        if self.G.shape[0]:
            G, h, X = promote(self.G, self.h, P)
            tol = tolerance(EPS_C, G, X)
            ok &= np.all(X @ G.T - h >= -tol, axis=1)
        if self.E.shape[0]:
            E, f, X = promote(self.E, self.f, P)
            tol = tolerance(EPS_C, E, X)
            ok &= np.all(np.abs(X @ E.T - f) <= tol, axis=1)
        return ok

    def params(self):
        return {"G": _fmt(self.G), "h": _fmt(self.h), "E": _fmt(self.E), "f": _fmt(self.f)}


class SocialWelfareFloor(LinearSet):
    """``{p : sum_i u_i(p) >= sw_min}``."""

    kind = "sw_floor"

    def __init__(self, game: Game, sw_min):
        self.sw_min = sw_min
        super().__init__(game.n_profiles, G=[list(game.welfare_vector())], h=[sw_min])

    def params(self):
        return {"sw_min": format_number(self.sw_min)}


class SupportZero(LinearSet):
    """``{p : p(a) = 0 for a in profiles}``; profiles given as flat indices."""

    kind = "support_zero"

    def __init__(self, n_profiles, profiles):
        self.profiles = tuple(sorted(int(k) for k in profiles))
        rows = np.zeros((len(self.profiles), n_profiles), dtype=int)
        for r, k in enumerate(self.profiles):
            rows[r, k] = 1
        super().__init__(n_profiles, E=rows.tolist(), f=[0] * len(self.profiles))

    def params(self):
        return {"profiles": list(self.profiles)}


class SupportPositive(FeasibleSet):
    """``{p : p(a) > 0 for a in profiles}``: convex but open."""

    kind = "support_positive"
    closed = False

    def __init__(self, n_profiles, profiles):
        super().__init__(n_profiles)
        self.profiles = tuple(sorted(int(k) for k in profiles))

    def _mask(self, P):
        cols = P[:, list(self.profiles)]
        if is_exact(P):
            return np.array([all(v > 0 for v in row) for row in cols], dtype=bool)
        return np.all(np.asarray(cols, dtype=float) >= EPS_OPEN, axis=1)

    def params(self):
        return {"profiles": list(self.profiles)}


class PureOnly(FeasibleSet):
    """Point masses only (a finite, non-convex set)."""

    kind = "pure_only"
    convex = False

    def _mask(self, P):
        if is_exact(P):
            return np.array([max(row) == 1 for row in P], dtype=bool)
        return np.asarray(P, dtype=float).max(axis=1) >= 1 - EPS_C


class Intersection(FeasibleSet):
    kind = "intersection"

    def __init__(self, parts):
        parts = list(parts)
        if not parts:
            raise InputError("intersection of nothing")
        sizes = {c.n_profiles for c in parts}
        if len(sizes) != 1:
            raise InputError("intersected sets live on different profile spaces")
        super().__init__(sizes.pop())
        self.parts = parts
        self.convex = all(c.convex for c in parts)
        self.closed = all(c.closed for c in parts)

    def linear(self):
        descs = [c.linear() for c in self.parts]
        if any(d is None for d in descs):
            return None
        G = np.concatenate([d[0] for d in descs])
        h = np.concatenate([d[1] for d in descs])
        E = np.concatenate([d[2] for d in descs])
        f = np.concatenate([d[3] for d in descs])
        return G, h, E, f

    def _mask(self, P):
        ok = np.ones(P.shape[0], dtype=bool)
        for c in self.parts:
            ok &= c._mask(P)
        return ok

    def to_dict(self):
        return {"kind": self.kind, "params": {"parts": [c.to_dict() for c in self.parts]}}


def full(game: Game) -> FullSimplex:
    return FullSimplex(game.n_profiles)


def sw_floor(game: Game, sw_min) -> SocialWelfareFloor:
    return SocialWelfareFloor(game, sw_min)


def intersection(*parts) -> Intersection:
    flat = []
    for c in parts:
        flat.extend(c.parts if isinstance(c, Intersection) else [c])
    return Intersection(flat)


def _profile_indices(game: Game, profiles) -> list:
    out = []
    for a in profiles:
        if isinstance(a, (int, np.integer)):
            out.append(int(a))
        else:
            out.append(game.profile_index([game.action_index(i, x) if isinstance(x, str) else x
                                           for i, x in enumerate(a)]))
    return out


def support_zero(game: Game, profiles) -> SupportZero:
    """Profiles may be flat indices, index tuples or label tuples like ``("Go", "Go")``."""
    return SupportZero(game.n_profiles, _profile_indices(game, profiles))


def support_positive(game: Game, profiles) -> SupportPositive:
    return SupportPositive(game.n_profiles, _profile_indices(game, profiles))


def pure_only(game: Game) -> PureOnly:
    return PureOnly(game.n_profiles)


def linear(game: Game, G=None, h=None, E=None, f=None) -> LinearSet:
    return LinearSet(game.n_profiles, G, h, E, f)


# JSON -----------------------------------------------------------------------


def from_dict(data: dict, game: Game) -> FeasibleSet:
    try:
        kind = data["kind"]
        params = data.get("params", {})
    except (KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"constraint JSON missing field: {exc}") from exc
    if kind == "full":
        return full(game)
    if kind == "sw_floor":
        return sw_floor(game, parse_number(params["sw_min"]))
    if kind == "linear":
        return linear(game, params.get("G"), params.get("h"), params.get("E"), params.get("f"))
    if kind == "support_zero":
        return support_zero(game, params["profiles"])
    if kind == "support_positive":
        return support_positive(game, params["profiles"])
    if kind == "pure_only":
        return pure_only(game)
    if kind == "intersection":
        return intersection(*(from_dict(c, game) for c in params["parts"]))
    raise InputError(f"unknown constraint kind {kind!r}")


def from_json(text: str, game: Game) -> FeasibleSet:
    try:
        return from_dict(json.loads(text), game)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid constraint JSON: {exc}") from exc
    except KeyError as exc:
        raise InputError(f"constraint JSON missing parameter {exc}") from exc


# Exact linear feasibility -----------------------------------------------------


def linear_feasible(G, h, E, f, n: int):
    """Exact test for ``{x >= 0 : G x >= h, E x = f}`` being non-empty.

    Returns a rational witness point (list of Fractions) or None. Float data is
    converted to its exact binary value first.
    """
    import cdd

    def rows(M, v):
        M = to_fraction_array(np.asarray(M, dtype=object).reshape(-1, n))
        v = to_fraction_array(np.asarray(v, dtype=object).reshape(-1))
        # cdd rows [b, a] encode b + a.x >= 0 (or = 0 on the linearity set)
        return [[-b] + list(r) for r, b in zip(M, v)]

    eq = rows(E, f)
    ineq = rows(G, h) + [[Fraction(0)] + [Fraction(int(j == k)) for j in range(n)] for k in range(n)]
    mat = cdd.Matrix(eq + ineq, number_type="fraction")
    mat.lin_set = frozenset(range(len(eq)))
    mat.obj_type = cdd.LPObjType.MAX
    mat.obj_func = [0] * (n + 1)
    lp = cdd.LinProg(mat)
    lp.solve()
    if lp.status == cdd.LPStatusType.INCONSISTENT:
        return None
    if lp.status != cdd.LPStatusType.OPTIMAL:
        raise RuntimeError(f"exact LP ended with status {lp.status}")
    return [Fraction(v) for v in lp.primal_solution]


def simplex_rows(n: int):
    """Equality ``sum p = 1`` as (E, f)."""
    return np.ones((1, n), dtype=int), np.ones(1, dtype=int)


def _empty_linear(n):
    return (np.zeros((0, n), dtype=object), np.zeros(0, dtype=object),
            np.zeros((0, n), dtype=object), np.zeros(0, dtype=object))


def _rows(M, v, n):
    if M is None or len(M) == 0:
        return np.zeros((0, n), dtype=object), np.zeros(0, dtype=object)
    M = as_array([[parse_number(x) if isinstance(x, str) else x for x in row] for row in M])
    v = as_array([parse_number(x) if isinstance(x, str) else x for x in v])
    if M.ndim != 2 or M.shape[1] != n or v.shape != (M.shape[0],):
        raise InputError(f"linear constraint rows must have {n} coefficients and one bound each")
    return M, v


def _fmt(arr):
    return [[format_number(x) for x in row] for row in arr] if arr.ndim == 2 else [format_number(x) for x in arr]
