"""
Welfare floors on the distribution simplex
==========================================

Sweep a grid over distributions on Chicken's four cells and classify each
point: inside the feasible set C, inside the correlated-equilibrium polytope
D, and whether it is a constrained equilibrium under C.
"""
import numpy as np

from ccelab import certify_c_cap_d_empty, classify, full, grid_array, is_cce_distribution, point_mass, sw_floor
from ccelab.games import chicken

game = chicken()
grid = grid_array(4, 60)
print(len(grid), "grid points")

base = next(classify(game, full(game), grid))
print("best symmetric CE payoff:", round(float(np.max(np.min(base.U[base.in_D], axis=1))), 3))

for floor in (12, 14, 15):
    C = sw_floor(game, floor)
    ch = next(classify(game, C, grid))
    outside = ch.is_CCE & ~ch.in_D
    sym = np.min(ch.U[ch.is_CCE], axis=1)
    print(f"SW >= {floor}: {int(ch.in_C.sum())} feasible, {int(ch.is_CCE.sum())} CCE,"
          f" {int(outside.sum())} of them outside D, best symmetric {sym.max():.3f}")
    empty, witness = certify_c_cap_d_empty(game, C)
    print("   C and D disjoint:", empty if empty else f"False, e.g. {[str(v) for v in witness]}")

# mutual passivity yields 16 total, so it meets the floor of 14; no one can
# deviate without dropping welfare to 13
print(is_cce_distribution(game, point_mass(game, (0, 0)), sw_floor(game, 14)).verdict)
