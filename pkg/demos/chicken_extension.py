"""
Chicken on a three-outcome device
=================================

A device draws H, M or L with equal odds. Player 1 only learns whether the
draw was H, player 2 only whether it was L. Each player's measurable
strategies are the constant-on-cell action maps, and the extended game
averages the base payoffs over the draw.
"""
from fractions import Fraction

import numpy as np

from ccelab import extend, is_correlated_equilibrium, profile_distribution, pure_nash_equilibria
from ccelab.games import CHICKEN_STRATEGIES, chicken, chicken_device, chicken_named

game = chicken()
device = chicken_device()
print(np.vectorize(str)(game.payoffs[..., 0]))
print(np.vectorize(str)(game.payoffs[..., 1]))

ext = extend(game, device)

# payoff matrix of the extended game in the s1..s4 naming
names = [(a, b) for a in range(1, 5) for b in range(1, 5)]
table = np.empty((4, 4), dtype=object)
for a, b in names:
    u = ext.game.payoffs[chicken_named(ext, (a, b))]
    table[a - 1, b - 1] = "(" + ", ".join(str(v) for v in u) + ")"
print(table)

# strategy s for player i is CHICKEN_STRATEGIES[i][k], as maps over (H, M, L)
for i in range(2):
    print(f"player {i + 1}:", [dict(zip("HML", (game.actions[i][x] for x in s)))
                               for s in CHICKEN_STRATEGIES[i]])

lookup = {chicken_named(ext, n): n for n in names}
print("pure Nash of the extended game:", sorted(lookup[idx] for idx in pure_nash_equilibria(ext.game)))

# (s3, s3) is the classic correlated equilibrium: nobody crashes and the
# outcome splits between the two "one yields" cells and mutual passivity
alpha = ext.profile(chicken_named(ext, (3, 3)))
rep = is_correlated_equilibrium(game, device, alpha)
print("CE:", rep.verdict, "with distribution", [str(Fraction(v)) for v in profile_distribution(game, device, alpha)])
