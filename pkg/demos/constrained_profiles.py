"""
Coupled constraints on strategy profiles
========================================

Restricting which joint profiles are allowed changes who can deviate, and so
which profiles are stable. Two small cases: a hand-picked feasible set in the
Chicken extension, and a traffic light with a no-collision rule.
"""
from fractions import Fraction

from ccelab import (
    explicit,
    extend,
    generated,
    is_constrained_correlated_equilibrium,
    partial_deviation_check,
    profile_distribution,
    support_zero,
)
from ccelab.equilibrium import constrained_equilibria
from ccelab.games import chicken, chicken_device, chicken_named, intersection, traffic_light


def show(p):
    return "[" + ", ".join(str(Fraction(v)) for v in p) + "]"


game, device = chicken(), chicken_device()
ext = extend(game, device)
allowed = [(1, 1), (1, 2), (2, 2), (2, 3), (2, 4), (3, 3), (3, 4), (4, 2), (4, 4)]
R = explicit(ext, [chicken_named(ext, n) for n in allowed])
lookup = {chicken_named(ext, n): n for n in allowed}

stable = [lookup[ext.indices(p)] for p in constrained_equilibria(game, device, R)]
print("constrained equilibria:", sorted(stable))

# no feasible change on a single cell helps at (s3, s4), but player 1 can flip
# both cells at once, moving to s4; (s4, s4) is allowed and pays more
alpha = ext.profile(chicken_named(ext, (3, 4)))
print("partial check:", partial_deviation_check(game, device, R, alpha).verdict)
full = is_constrained_correlated_equilibrium(game, device, R, alpha)
print("full check:   ", full.verdict)
w = full.witnesses[0]
print(f"  player {w.player + 1} gains {w.gain} by playing {w.deviation['map']}")

# traffic light: one signal per driver, perfectly anti-correlated
game, device = intersection(), traffic_light()
ext = extend(game, device)
W, G = game.action_index(0, "Wait"), game.action_index(0, "Go")
obey = ((W, G), (G, W))
only_obey = explicit(ext, [ext.indices(obey)])
print("singleton set:", [p.maps for p in constrained_equilibria(game, device, only_obey)])

no_crash = generated(support_zero(game, [("Go", "Go"), ("Wait", "Wait")]))
for p in constrained_equilibria(game, device, no_crash):
    print("no-collision CCE", p.maps, "->", show(profile_distribution(game, device, p)))
# the constant profiles (one driver always goes) are stable too: any
# unilateral change would put mass on a forbidden cell
