import logging
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import distributions, feasible_sets, games
from ccelab import constraints as cons
from ccelab.canonical import DeviationMap, is_cce_distribution
from ccelab.equilibrium import is_ce_distribution
from ccelab.errors import CapabilityError, DomainError, InputError
from ccelab.explorer import grid_array
from ccelab.fixedpoint import (
    find_fixed_point,
    g_map,
    multi_start,
    phi,
    residual,
    residual_batch,
    starting_points,
)
from ccelab.game import make_game, point_mass
from ccelab.games import chicken

THIRD = F(1, 3)


def test_phi_examples():
    g = chicken()
    C = cons.full(g)
    pp = point_mass(g, (0, 0))
    assert phi(g, pp, DeviationMap(0, (0, 1)), C) == 0
    assert phi(g, pp, DeviationMap(0, (1, 1)), C) == 2
    ce = [THIRD, THIRD, THIRD, 0]
    for i in range(2):
        for table in [(0, 0), (1, 1), (1, 0)]:
            assert phi(g, ce, DeviationMap(i, table), C) == 0


def test_phi_outside_domain():
    g = chicken()
    with pytest.raises(DomainError):
        phi(g, point_mass(g, (0, 0)), DeviationMap(0, (1, 1)), cons.sw_floor(g, 14))


def test_g_map_examples():
    g = chicken()
    C = cons.full(g)
    ev = g_map(g, [THIRD, THIRD, THIRD, 0], C)
    assert ev.residual == 0 and list(ev.output) == [THIRD, THIRD, THIRD, 0]
    ev = g_map(g, point_mass(g, (0, 0)), C)
    assert ev.residual > 0
    assert sum(ev.output) == 1 and all(v >= 0 for v in ev.output)
    one = make_game([[(3, 1)]], actions=[["x"], ["y"]])
    assert g_map(one, [1], cons.full(one)).residual == 0


def test_g_map_weights_hand_computed():
    # at (P,P) both players gain 2 from turning aggressive; the P->A swap gains the same
    g = chicken()
    ev = g_map(g, point_mass(g, (0, 0)), cons.full(g))
    assert ev.phi[(0, (1, 1))] == 2 and ev.phi[(0, (1, 0))] == 2
    assert ev.phi[(1, (1, 1))] == 2 and ev.phi[(1, (1, 0))] == 2
    assert sum(ev.weights()) == 1
    assert list(ev.output) == [F(1, 9), F(4, 9), F(4, 9), 0]


def test_capability_errors():
    g = chicken()
    for C in (cons.pure_only(g), cons.support_positive(g, [0]), cons.support_positive(g, [0]) & cons.full(g)):
        with pytest.raises(CapabilityError):
            g_map(g, [F(1, 4)] * 4, C)
        with pytest.raises(CapabilityError):
            find_fixed_point(g, C, [F(1, 4)] * 4)
        with pytest.raises(CapabilityError):
            multi_start(g, C)


def test_domain_and_input_errors():
    g = chicken()
    C = cons.sw_floor(g, 14)
    with pytest.raises(DomainError):
        g_map(g, [0, 1, 0, 0], C)
    with pytest.raises(InputError):
        find_fixed_point(g, C, [0, 1, 0, 0])
    with pytest.raises(InputError):
        find_fixed_point(g, cons.full(g), [F(1, 4)] * 4, damping=0)
    with pytest.raises(InputError):
        find_fixed_point(g, cons.full(g), [F(1, 4)] * 4, damping=1.5)


def test_start_at_cce():
    g = chicken()
    res = find_fixed_point(g, cons.full(g), [THIRD, THIRD, THIRD, 0])
    assert res.converged and res.iterations == 0 and res.residual < 1e-8


@pytest.mark.parametrize("damping", [1.0, 0.5])
def test_uniform_start_lands_in_polytope(damping):
    g = chicken()
    res = find_fixed_point(g, cons.full(g), [F(1, 4)] * 4, damping=damping)
    assert res.converged
    assert is_ce_distribution(g, res.point).verdict
    assert is_cce_distribution(g, res.point, cons.full(g)).verdict


def test_heavy_damping_multi_start():
    # from the uniform start a small step creeps toward the mixed equilibrium, whose
    # incentive constraints are tight; other starts finish
    g = chicken()
    single = find_fixed_point(g, cons.full(g), [F(1, 4)] * 4, damping=0.1)
    if not single.converged:
        assert not is_cce_distribution(g, single.point, cons.full(g)).verdict
    res = multi_start(g, cons.full(g), damping=0.1)
    assert res.converged and is_cce_distribution(g, res.point, cons.full(g)).verdict


def test_multi_start_sw12():
    g = chicken()
    C = cons.sw_floor(g, 12)
    res = multi_start(g, C)
    assert res.converged and 1 <= res.starts_used <= 16
    assert C.contains(res.point)
    assert is_cce_distribution(g, res.point, C).verdict
    again = multi_start(g, C)
    assert again.to_json() == res.to_json()
    data = res.to_dict()
    assert set(data) == {"point", "residual", "converged", "iterations", "starts_used"}


def test_starting_points():
    g = chicken()
    C = cons.sw_floor(g, 12)
    starts = starting_points(g, C, n_starts=16, seed=0)
    assert len(starts) == 16
    assert all(C.contains(s) for s in starts)
    assert all(np.isclose(np.sum(s), 1) for s in starts)
    assert [list(s) for s in starts] == [list(s) for s in starting_points(g, C, n_starts=16, seed=0)]


def test_thread_count_does_not_change_result(monkeypatch):
    g = chicken()
    C = cons.sw_floor(g, 12)
    monkeypatch.setenv("CCE_NUM_THREADS", "1")
    one = multi_start(g, C, n_starts=8)
    monkeypatch.setenv("CCE_NUM_THREADS", "4")
    four = multi_start(g, C, n_starts=8)
    assert one.to_json() == four.to_json()


def test_feasible_set_changes_are_logged(caplog):
    # g can push the iterate out of the welfare floor's interior, changing H_i
    g = chicken()
    C = cons.sw_floor(g, 12)
    with caplog.at_level(logging.DEBUG, logger="ccelab.fixedpoint"):
        res = find_fixed_point(g, C, point_mass(g, (0, 0), exact=False), max_iter=500)
    assert res.h_changes >= 1
    assert res.h_changes == sum("feasible deviation sets changed" in r.getMessage() for r in caplog.records)


@pytest.mark.parametrize("kind", ["full", "sw12"])
def test_fixed_point_characterization_grid(kind):
    g = chicken()
    C = cons.full(g) if kind == "full" else cons.sw_floor(g, 12)
    grid = grid_array(4, 24, exact=True)
    P = [p for p in grid if C.contains(p)]
    for p in P:
        exact_res = g_map(g, p, C).residual
        accepted = is_cce_distribution(g, p, C).verdict
        assert (exact_res < 1e-9) == accepted
    fl = residual_batch(g, np.array(P, dtype=float), C)
    assert list(fl < 1e-9) == [is_cce_distribution(g, p, C).verdict for p in P]


@settings(max_examples=150)
@given(st.data())
def test_g_output_properties(data):
    g = data.draw(games(max_actions=3))
    C = data.draw(feasible_sets(g, convex_only=True))
    p = data.draw(distributions(g.n_profiles))
    if not C.contains(p):
        return
    ev = g_map(g, p, C)
    assert all(v >= 0 for v in ev.phi.values())
    assert sum(ev.weights()) == 1
    assert sum(ev.output) == 1 and all(v >= 0 for v in ev.output)
    assert C.contains(ev.output)
    assert (ev.residual < 1e-9) == is_cce_distribution(g, p, C).verdict
    assert residual(g, p, C) == ev.residual
    assert np.isclose(residual_batch(g, np.array([p], dtype=float), C)[0], ev.residual, atol=1e-12)
