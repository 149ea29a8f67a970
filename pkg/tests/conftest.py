from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ccelab import constraints as cons
from ccelab.device import CorrelationDevice, make_profile
from ccelab.game import make_game

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# number of randomized instances in each property suite
SUITE = 500

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


@st.composite
def games(draw, max_actions=3, n_players=2, lo=-5, hi=5):
    shape = tuple(draw(st.integers(1, max_actions)) for _ in range(n_players))
    size = int(np.prod(shape)) * n_players
    flat = draw(st.lists(st.integers(lo, hi), min_size=size, max_size=size))
    table = np.array(flat, dtype=object).reshape(shape + (n_players,)).tolist()
    actions = [[f"a{i}{k}" for k in range(n)] for i, n in enumerate(shape)]
    return make_game(table, actions)


@st.composite
def priors(draw, n, allow_zero=False):
    weights = draw(st.lists(st.integers(0 if allow_zero else 1, 6), min_size=n, max_size=n))
    if sum(weights) == 0:
        weights[0] = 1
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


@st.composite
def devices(draw, n_players, max_outcomes=4, allow_zero=False):
    n = draw(st.integers(1, max_outcomes))
    q = draw(priors(n, allow_zero))
    parts = []
    for _ in range(n_players):
        labels = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
        parts.append([[w for w in range(n) if labels[w] == c] for c in sorted(set(labels))])
    return CorrelationDevice(tuple(f"w{k}" for k in range(n)), q, parts)


@st.composite
def profiles(draw, game, device):
    maps = []
    for i in range(game.n_players):
        per_cell = [draw(st.integers(0, game.shape[i] - 1)) for _ in device.partitions[i]]
        cell_of = device.cell_of(i)
        maps.append([per_cell[c] for c in cell_of])
    return make_profile(game, device, maps)


@st.composite
def distributions(draw, n, exact=True, denom=12):
    if exact:
        weights = draw(st.lists(st.integers(0, denom), min_size=n, max_size=n))
        if sum(weights) == 0:
            weights[draw(st.integers(0, n - 1))] = 1
        total = sum(weights)
        return np.array([Fraction(w, total) for w in weights], dtype=object)
    raw = draw(st.lists(st.floats(0, 1, allow_nan=False), min_size=n, max_size=n))
    raw = np.array(raw) + 1e-3
    return raw / raw.sum()


@st.composite
def feasible_sets(draw, game, convex_only=False):
    """A random feasible set from the built-in kinds."""
    sw = game.welfare_vector()
    lo, hi = int(min(sw)), int(max(sw))
    kinds = ["full", "sw_floor", "support_zero", "intersection"]
    if not convex_only:
        kinds += ["pure_only", "support_positive"]
    kind = draw(st.sampled_from(kinds))
    if kind == "full":
        return cons.full(game)
    if kind == "sw_floor":
        return cons.sw_floor(game, draw(st.integers(lo - 1, hi)))
    if kind == "pure_only":
        return cons.pure_only(game)
    picks = draw(st.lists(st.integers(0, game.n_profiles - 1), min_size=1, max_size=max(1, game.n_profiles - 1),
                          unique=True))
    if kind == "support_zero":
        return cons.support_zero(game, picks)
    if kind == "support_positive":
        return cons.support_positive(game, picks[:1])
    return cons.sw_floor(game, draw(st.integers(lo - 1, hi))) & cons.support_zero(game, picks)


@pytest.fixture
def record_acceptance():
    def record(key, ok, detail=""):
        ACCEPTANCE[key] = (bool(ok), detail)
    return record
