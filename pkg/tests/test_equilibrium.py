import itertools
import json
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import devices, distributions, games, profiles
from ccelab import constraints as cons
from ccelab.canonical import DeviationMap, z_transform
from ccelab.device import extend, make_profile, profile_distribution, trivial_device
from ccelab.equilibrium import (
    ExplicitProfiles,
    alternative_characterization_check,
    all_profiles,
    ce_distribution_inequalities,
    ce_mask,
    constrained_equilibria,
    ex_post_check,
    explicit,
    generated,
    is_ce_distribution,
    is_constrained_correlated_equilibrium,
    is_correlated_equilibrium,
    is_generalized_nash,
    partial_deviation_check,
    per_outcome_sufficient,
    unconstrained,
)
from ccelab.errors import ResourceError
from ccelab.game import expected_utility, make_game, point_mass, pure_nash_equilibria
from ccelab.games import chicken, chicken_device, chicken_named, intersection, traffic_light

RESTRICTED = [(1, 1), (1, 2), (2, 2), (2, 3), (2, 4), (3, 3), (3, 4), (4, 2), (4, 4)]
THIRD = F(1, 3)


@pytest.fixture
def restricted_chicken():
    g, d = chicken(), chicken_device()
    ext = extend(g, d)
    R = explicit(ext, [chicken_named(ext, n) for n in RESTRICTED])
    named = lambda n: ext.profile(chicken_named(ext, n))  # noqa: E731
    return g, d, ext, R, named


def test_ce_examples(restricted_chicken):
    g, d, ext, _, named = restricted_chicken
    assert is_correlated_equilibrium(g, d, named((3, 3))).verdict
    rep = is_correlated_equilibrium(g, d, named((1, 1)))
    assert not rep.verdict
    # any improving deviation works as a witness; the row player gains by moving to s^2
    assert tuple(ext.game.payoffs[chicken_named(ext, (2, 1))]) > tuple(ext.game.payoffs[chicken_named(ext, (1, 1))])
    assert rep.witnesses[0].gain > 0
    triv = trivial_device(2)
    assert is_correlated_equilibrium(g, triv, [[0], [1]]).verdict


def test_ex_post_examples(restricted_chicken):
    g, d, _, _, named = restricted_chicken
    for n in [(2, 1), (1, 2), (3, 3)]:
        assert ex_post_check(g, d, named(n)).verdict
    assert not ex_post_check(g, d, named((1, 1))).verdict
    assert ex_post_check(g, trivial_device(2), [[1], [0]]).verdict


def test_report_json(restricted_chicken):
    g, d, _, _, named = restricted_chicken
    rep = is_correlated_equilibrium(g, d, named((1, 1)))
    data = json.loads(rep.to_json())
    assert data["verdict"] is False
    w = data["witnesses"][0]
    assert set(w) >= {"player", "deviation", "gain"}
    assert data["margins"] and all("slack" in m for m in data["margins"])


def _as_text(ineq, game):
    labels = ["".join(game.actions[j][k] for j, k in enumerate(a)) for a in game.profiles()]
    return {labels[k]: v for k, v in enumerate(ineq.coeffs) if v != 0}


def test_chicken_ce_inequalities():
    g = chicken()
    incentive = [q for q in ce_distribution_inequalities(g) if q.label[0] == "incentive"]
    assert len(incentive) == 4
    rows = {q.label[1:]: _as_text(q, g) for q in incentive}
    # row player told P: 3 p(P,A) >= 2 p(P,P)
    assert rows[(0, 0, 1)] == {"PP": -2, "PA": 3}
    # row player told A: 2 p(A,P) >= 3 p(A,A)
    assert rows[(0, 1, 0)] == {"AP": 2, "AA": -3}
    assert rows[(1, 0, 1)] == {"PP": -2, "AP": 3}
    assert rows[(1, 1, 0)] == {"PA": 2, "AA": -3}
    assert all(q.rhs == 0 for q in incentive)


def test_trivial_game_inequalities():
    g = make_game([[(1, 2)]], actions=[["x"], ["y"]])
    assert not [q for q in ce_distribution_inequalities(g) if q.label[0] == "incentive"]


def test_ce_distribution_examples():
    g = chicken()
    assert is_ce_distribution(g, [THIRD, THIRD, THIRD, 0]).verdict
    assert not is_ce_distribution(g, [0, THIRD, THIRD, THIRD]).verdict
    assert is_ce_distribution(g, point_mass(g, (1, 0))).verdict


def _brute_ce(game, p):
    u = expected_utility(game, p)
    for i in range(game.n_players):
        n = game.shape[i]
        for table in itertools.product(range(n), repeat=n):
            if expected_utility(game, z_transform(game, p, DeviationMap(i, table)))[i] > u[i]:
                return False
    return True


@given(st.data())
def test_ce_distribution_vs_all_relabelings(data):
    g = data.draw(games(max_actions=3))
    p = data.draw(distributions(g.n_profiles))
    assert is_ce_distribution(g, p).verdict == _brute_ce(g, p)


@given(st.data())
def test_ce_mask_batch(data):
    g = data.draw(games(max_actions=3))
    P = np.stack([data.draw(distributions(g.n_profiles, exact=False)) for _ in range(6)])
    assert list(ce_mask(g, P)) == [is_ce_distribution(g, p).verdict for p in P]


def test_generalized_nash_examples(restricted_chicken):
    g, d, ext, _, _ = restricted_chicken
    R_idx = {chicken_named(ext, n) for n in RESTRICTED}
    found = {a for a in itertools.product(range(4), range(4)) if is_generalized_nash(ext.game, R_idx, a).verdict}
    assert found == {chicken_named(ext, n) for n in [(1, 2), (3, 3), (4, 4)]}
    every = {a for a in itertools.product(range(4), range(4)) if is_generalized_nash(ext.game, None, a).verdict}
    assert every == set(pure_nash_equilibria(ext.game))
    rep = is_generalized_nash(ext.game, R_idx, chicken_named(ext, (1, 3)))
    assert not rep.verdict and "infeasible" in rep.witnesses[0].note
    # predicate form agrees with the set form
    pred = lambda a: tuple(a) in R_idx  # noqa: E731
    assert {a for a in itertools.product(range(4), range(4)) if is_generalized_nash(ext.game, pred, a).verdict} == found


def test_intersection_singleton_rule():
    g, d = intersection(), traffic_light()
    ext = extend(g, d)
    alpha = ((0, 1), (1, 0))
    assert is_generalized_nash(ext.game, {ext.indices(alpha)}, ext.indices(alpha)).verdict
    single = explicit(ext, [ext.indices(alpha)])
    assert [p.maps for p in constrained_equilibria(g, d, single)] == [alpha]


def test_intersection_no_collision():
    g, d = intersection(), traffic_light()
    R = generated(cons.support_zero(g, [("Go", "Go"), ("Wait", "Wait")]))
    alpha = make_profile(g, d, [(0, 1), (1, 0)])
    delta = make_profile(g, d, [(1, 0), (0, 1)])
    for prof in (alpha, delta):
        assert list(profile_distribution(g, d, prof)) == [0, F(1, 2), F(1, 2), 0]
        assert is_constrained_correlated_equilibrium(g, d, R, prof).verdict
        assert alternative_characterization_check(g, d, R, prof).verdict
    assert profile_distribution(g, d, alpha).tolist() == profile_distribution(g, d, delta).tolist()
    # the constant profiles also survive: every deviation from them either collides or idles
    found = {p.maps for p in constrained_equilibria(g, d, R)}
    assert found == {alpha.maps, delta.maps, ((0, 0), (1, 1)), ((1, 1), (0, 0))}


def test_restricted_separation(restricted_chicken):
    g, d, ext, R, named = restricted_chicken
    prof = named((3, 4))
    assert partial_deviation_check(g, d, R, prof).verdict
    rep = is_constrained_correlated_equilibrium(g, d, R, prof)
    assert not rep.verdict
    w = rep.witnesses[0]
    assert w.player == 0 and tuple(w.deviation["map"]) == ext.strategies[0][chicken_named(ext, (4, 1))[0]]
    assert not alternative_characterization_check(g, d, R, prof).verdict


def test_restricted_full_set(restricted_chicken):
    g, d, ext, R, named = restricted_chicken
    found = {ext.indices(p) for p in constrained_equilibria(g, d, R)}
    assert found == {chicken_named(ext, n) for n in [(1, 2), (3, 3), (4, 4)]}
    for p in all_profiles(g, d):
        assert (alternative_characterization_check(g, d, R, p).verdict
                == is_constrained_correlated_equilibrium(g, d, R, p).verdict)


def test_per_outcome_examples(restricted_chicken):
    g, d, _, R, named = restricted_chicken
    prof = named((1, 2))
    assert per_outcome_sufficient(g, d, R, prof).verdict
    assert is_constrained_correlated_equilibrium(g, d, R, prof).verdict
    assert partial_deviation_check(g, d, R, prof).verdict
    # sufficient only: (s1^4, s2^4) is a constrained equilibrium that loses on some cell
    prof = named((4, 4))
    assert is_constrained_correlated_equilibrium(g, d, R, prof).verdict
    assert not per_outcome_sufficient(g, d, R, prof).verdict
    assert per_outcome_sufficient(g, trivial_device(2), unconstrained(), [[0], [1]]).verdict


def test_full_set_reduces_to_ce(restricted_chicken):
    g, d, _, _, named = restricted_chicken
    R = unconstrained()
    for n in itertools.product(range(1, 5), repeat=2):
        prof = named(n)
        ce = is_correlated_equilibrium(g, d, prof).verdict
        assert is_constrained_correlated_equilibrium(g, d, R, prof).verdict == ce
        assert alternative_characterization_check(g, d, R, prof).verdict == ce
        assert partial_deviation_check(g, d, R, prof).verdict == ex_post_check(g, d, prof).verdict


def _random_explicit(data, ext):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    keep = rng.random(ext.game.shape) < 0.6
    return ExplicitProfiles(ext.profile(tuple(int(k) for k in a)) for a in np.argwhere(keep))


@given(st.data())
def test_per_outcome_implies_cce(data):
    g = data.draw(games(max_actions=3))
    d = data.draw(devices(2, max_outcomes=3))
    ext = extend(g, d)
    R = _random_explicit(data, ext)
    prof = data.draw(profiles(g, d))
    if per_outcome_sufficient(g, d, R, prof).verdict:
        assert is_constrained_correlated_equilibrium(g, d, R, prof).verdict


@given(st.data())
def test_cce_implies_partial(data):
    g = data.draw(games(max_actions=3))
    d = data.draw(devices(2, max_outcomes=3))
    ext = extend(g, d)
    R = _random_explicit(data, ext)
    prof = data.draw(profiles(g, d))
    if is_constrained_correlated_equilibrium(g, d, R, prof).verdict:
        assert partial_deviation_check(g, d, R, prof).verdict


@given(st.data())
def test_partial_equals_ex_post_without_constraints(data):
    g = data.draw(games(max_actions=3))
    d = data.draw(devices(2, max_outcomes=4, allow_zero=True))
    prof = data.draw(profiles(g, d))
    assert partial_deviation_check(g, d, unconstrained(), prof).verdict == ex_post_check(g, d, prof).verdict


@given(st.data())
def test_failures_carry_witnesses(data):
    g = data.draw(games(max_actions=3))
    d = data.draw(devices(2, max_outcomes=3))
    ext = extend(g, d)
    R = _random_explicit(data, ext)
    prof = data.draw(profiles(g, d))
    for check in (is_constrained_correlated_equilibrium, alternative_characterization_check,
                  per_outcome_sufficient, partial_deviation_check):
        rep = check(g, d, R, prof)
        if not rep.verdict:
            assert rep.witnesses
        elif rep.margins:
            assert min(v for _, v in rep.margins) >= -1e-9


def test_float_tolerance():
    g = make_game([[(1.0, 1.0), (0.0, 1.0 - 5e-10)]], actions=[["a"], ["x", "y"]])
    d = trivial_device(2)
    assert is_correlated_equilibrium(g, d, [[0], [1]]).verdict
    g2 = make_game([[(1.0, 1.0), (0.0, 1.0 - 5e-9)]], actions=[["a"], ["x", "y"]])
    assert not is_correlated_equilibrium(g2, d, [[0], [1]]).verdict


def test_profile_cap():
    g, d = chicken(), chicken_device()
    with pytest.raises(ResourceError):
        list(all_profiles(g, d, cap=10))
