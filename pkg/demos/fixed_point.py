"""
Finding a constrained equilibrium by iteration
==============================================

The map g pushes mass along every profitable feasible swap deviation, weighted
by its gain. Its fixed points inside a closed convex C are exactly the
constrained equilibria, so damped iteration from a few starts finds one.
"""
import logging
from fractions import Fraction

import numpy as np

from ccelab import find_fixed_point, full, g_map, is_cce_distribution, multi_start, point_mass, sw_floor
from ccelab.games import chicken

game = chicken()

# one exact step from mutual passivity: both players gain 2 by turning aggressive
ev = g_map(game, point_mass(game, (0, 0)), full(game))
print("residual", ev.residual, "next point", [str(v) for v in ev.output])

res = find_fixed_point(game, full(game), [Fraction(1, 4)] * 4)
print("uniform start:", res.converged, res.iterations, "iterations ->", np.round(res.point, 4))

# smaller steps need more iterations; a run counts as converged only once the
# point also passes the equilibrium test, so some starts may be given up on
for damping in (1.0, 0.5, 0.1):
    res = multi_start(game, full(game), damping=damping)
    print(f"damping {damping}: converged {res.converged}, {res.iterations} iterations, {res.starts_used} start(s)")

logging.basicConfig(level=logging.DEBUG, format="%(name)s: %(message)s")
C = sw_floor(game, 12)
res = multi_start(game, C, n_starts=4)
print("SW >= 12:", np.round(res.point, 4), "welfare", round(float(np.dot(res.point, [16, 13, 13, 0])), 4))
print("accepted by the distribution test:", is_cce_distribution(game, res.point, C).verdict)
