"""Dual-mode arithmetic helpers.

Arrays holding :class:`fractions.Fraction` (numpy ``object`` dtype) are treated
as exact; float64 arrays use the tolerances below. Mixing the two promotes to
float64.
"""
from __future__ import annotations

import os
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import InputError

EPS_SUM = 1e-9
EPS_EQ = 1e-9
EPS_C = 1e-9
EPS_OPEN = 1e-12


def parse_number(value):
    """Parse a JSON scalar: ints and ``"p/q"`` strings become Fractions, floats stay floats."""
    if isinstance(value, bool):
        raise InputError(f"not a number: {value!r}")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse number {value!r}") from exc
    raise InputError(f"not a number: {value!r}")


def format_number(value):
    """Inverse of :func:`parse_number` for JSON output."""
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else int(value.numerator)
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(value)


def as_array(values) -> np.ndarray:
    """Convert nested numbers to an exact object array if every entry is rational, else float64."""
    arr = np.asarray(values, dtype=object)
    flat = arr.ravel()
    if all(isinstance(v, Rational) and not isinstance(v, bool) for v in flat):
        out = np.empty(arr.shape, dtype=object)
        out.ravel()[:] = [Fraction(v) for v in flat]
        return out
    try:
        return np.asarray(arr, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError("array contains non-numeric entries") from exc


def is_exact(arr) -> bool:
    return isinstance(arr, np.ndarray) and arr.dtype == object


def promote(*arrays):
    """Return the arrays in a common mode: all exact if all exact, otherwise all float64."""
    if all(is_exact(a) for a in arrays):
        return arrays
    return tuple(np.asarray(a, dtype=float) for a in arrays)


def tolerance(eps: float, *arrays) -> float:
    """Zero in exact mode, ``eps`` otherwise."""
    return 0 if all(is_exact(a) for a in arrays) else eps


def zeros_like_mode(shape, ref) -> np.ndarray:
    if is_exact(ref):
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape)


def to_float(arr) -> np.ndarray:
    return np.asarray(arr, dtype=float)


def to_fraction_array(arr) -> np.ndarray:
    """Exact copy of ``arr``; floats are converted to their exact binary value."""
    arr = np.asarray(arr)
    out = np.empty(arr.shape, dtype=object)
    out.ravel()[:] = [v if isinstance(v, Fraction) else Fraction(v) for v in arr.ravel().tolist()]
    return out


def num_threads() -> int:
    """Worker count from ``CCE_NUM_THREADS`` (default 1)."""
    raw = os.environ.get("CCE_NUM_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"CCE_NUM_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)
