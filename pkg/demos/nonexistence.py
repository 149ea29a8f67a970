"""
When constrained equilibria fail to exist
=========================================

This 2x2 game has only a mixed Nash equilibrium. If the feasible
set only admits point masses, every admissible profile has a profitable
admissible deviation on every device we try. A second game shows why pure
deviations are not enough when players may randomize.
"""
from fractions import Fraction

from ccelab import constraints as cons
from ccelab import generated, is_constrained_correlated_equilibrium, make_mixed_profile, trivial_device
from ccelab.device import constant_mixed, enumerate_devices, induced_distribution, mixed_utility
from ccelab.equilibrium import all_profiles
from ccelab.games import no_pure_nash, randomization_gap

game = no_pure_nash()
print(game.payoffs.astype(int))
R = generated(cons.pure_only(game))

priors = [[1], [Fraction(1, 2), Fraction(1, 2)], [Fraction(1, 3)] * 3]
checked = stable = 0
for q in priors:
    for device in enumerate_devices(2, len(q), [q]):
        for prof in all_profiles(game, device):
            checked += 1
            stable += is_constrained_correlated_equilibrium(game, device, R, prof).verdict
print(f"{stable} stable profiles out of {checked}")

# randomization: under "(A, C) has positive mass", the pure profile (A, C)
# passes every pure check, yet player 1 mixing half-half keeps (A, C) in the
# support and raises their payoff
game = randomization_gap()
device = trivial_device(2)
C = cons.support_positive(game, [("A", "C")])
print("pure check:", is_constrained_correlated_equilibrium(game, device, generated(C), [[0], [0]]).verdict)
half = Fraction(1, 2)
gamma = make_mixed_profile(game, device, [constant_mixed(device, [half, half]), constant_mixed(device, [1, 0])])
p = induced_distribution(game, device, gamma)
print("mixed deviation:", [str(v) for v in p], "feasible", C.contains(p), "u1 =", mixed_utility(game, device, gamma)[0])
