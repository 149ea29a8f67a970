"""Small named games used throughout the tests and demos (all exact)."""
from fractions import Fraction

from .game import Game, make_game


def chicken() -> Game:
    """Chicken with actions Peaceful/Aggressive."""
    return make_game([[(8, 8), (3, 10)],
                      [(10, 3), (0, 0)]],
                     actions=[("P", "A"), ("P", "A")])


def intersection() -> Game:
    """Two drivers at a crossing: waiting pays 0, going alone pays 1, a collision costs 1 each."""
    return make_game([[(0, 0), (0, 1)],
                      [(1, 0), (-1, -1)]],
                     actions=[("Wait", "Go"), ("Wait", "Go")])


def no_pure_nash() -> Game:
    """2x2 game whose only equilibrium is mixed: ((5/6 U, 1/6 D), (1/2 L, 1/2 R))."""
    return make_game([[(2, 2), (1, 1)],
                      [(3, 0), (0, 5)]],
                     actions=[("U", "D"), ("L", "R")])


def randomization_gap() -> Game:
    """2x2 game where (A, C) survives pure deviations under {p(A,C) > 0} but not mixed ones."""
    return make_game([[(0, 0), (1, 2)],
                      [(2, 1), (3, 0)]],
                     actions=[("A", "B"), ("C", "D")])


def chicken_mixed_equilibrium():
    return ((Fraction(3, 5), Fraction(2, 5)), (Fraction(3, 5), Fraction(2, 5)))


def chicken_device():
    """Three equally likely outcomes; player 1 learns whether H occurred, player 2 whether L occurred."""
    from .device import CorrelationDevice
    third = Fraction(1, 3)
    return CorrelationDevice(("H", "M", "L"), [third] * 3,
                             [[("H",), ("M", "L")], [("H", "M"), ("L",)]])


# The named strategies of the Chicken extension, as outcome-to-action maps over
# (H, M, L). Index k holds strategy s^{k+1}; enumeration order differs.
CHICKEN_STRATEGIES = (
    ((0, 0, 0), (1, 1, 1), (1, 0, 0), (0, 1, 1)),
    ((0, 0, 0), (1, 1, 1), (0, 0, 1), (1, 1, 0)),
)


def chicken_named(extended, names):
    """Index tuple in ``extended`` for a pair of 1-based names, e.g. ``(3, 4)`` for (s1^3, s2^4)."""
    return tuple(extended.strategies[i].index(CHICKEN_STRATEGIES[i][k - 1]) for i, k in enumerate(names))


def traffic_light():
    """Two outcomes (r,g) and (g,r) with probability 1/2 each; both drivers see the outcome."""
    from .device import CorrelationDevice
    half = Fraction(1, 2)
    return CorrelationDevice(("rg", "gr"), [half, half], [[("rg",), ("gr",)], [("rg",), ("gr",)]])
