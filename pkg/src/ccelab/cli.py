"""Command-line front end.

Exit codes: 0 verdict true (or converged), 1 verdict false (or not converged),
2 unreadable or invalid input, 3 an enumeration cap was hit, 4 the requested
procedure does not apply to the inputs.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import constraints as cons
from .canonical import is_cce_distribution
from .device import CorrelationDevice, extend, make_profile, profile_distribution, trivial_device
from .equilibrium import (
    ExplicitProfiles,
    generated,
    is_ce_distribution,
    is_constrained_correlated_equilibrium,
    is_correlated_equilibrium,
)
from .errors import CapabilityError, InputError, ResourceError
from .explorer import DEFAULT_GRID_CAP, explore, summary_json
from .fixedpoint import find_fixed_point, multi_start
from .game import Game, check_distribution
from .numeric import EPS_EQ, format_number, parse_number

log = logging.getLogger("ccelab")

EXIT_TRUE, EXIT_FALSE, EXIT_INPUT, EXIT_RESOURCE, EXIT_CAPABILITY = 0, 1, 2, 3, 4


def _read_json(path, what):
    if path is None:
        raise InputError(f"--{what} is required")
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} file {path} is not valid JSON: {exc}") from exc


def _load_game(args) -> Game:
    return Game.from_dict(_read_json(args.game, "game"))


def _load_device(args):
    return None if args.device is None else CorrelationDevice.from_dict(_read_json(args.device, "device"))


def _write(args, text: str):
    if args.out in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    try:
        with open(args.out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc.strerror}") from exc


def _action(game, player, x):
    if isinstance(x, str):
        return game.action_index(player, x)
    return int(x)


def _strategy(extended, player, x):
    strats = extended.strategies[player]
    if isinstance(x, list):
        # an outcome-to-action map, e.g. ["A", "P", "P"]
        amap = tuple(_action(extended.base, player, a) for a in x)
        if amap not in strats:
            raise InputError(f"{x} is not a measurable strategy of player {player}")
        return strats.index(amap)
    if isinstance(x, str):
        labels = extended.game.actions[player]
        if x not in labels:
            raise InputError(f"unknown strategy {x!r} for player {player}")
        return labels.index(x)
    if not 0 <= int(x) < len(strats):
        raise InputError(f"strategy index {x} out of range for player {player}")
    return int(x)


def parse_profile(data, game, device, cap):
    """Correlated profile from ``{"maps"}``, ``{"strategies"}``, ``{"cells"}`` or ``{"actions"}`` JSON."""
    if isinstance(data, list):
        data = {"actions": data}
    if not isinstance(data, dict):
        raise InputError("profile JSON must be an object or a list of actions")
    if "actions" in data:
        acts = data["actions"]
        if len(acts) != game.n_players:
            raise InputError("need one action per player")
        maps = [[_action(game, i, x)] * device.n_outcomes for i, x in enumerate(acts)]
        return make_profile(game, device, maps)
    if "maps" in data:
        maps = [[_action(game, i, x) for x in m] for i, m in enumerate(data["maps"])]
        return make_profile(game, device, maps)
    if "cells" in data:
        from .device import profile_from_cells
        cells = [[_action(game, i, x) for x in c] for i, c in enumerate(data["cells"])]
        return profile_from_cells(game, device, cells)
    if "strategies" in data:
        ext = extend(game, device, cap)
        idx = data["strategies"]
        if len(idx) != game.n_players:
            raise InputError("need one strategy per player")
        return ext.profile([_strategy(ext, i, x) for i, x in enumerate(idx)])
    raise InputError("profile JSON needs one of: actions, maps, cells, strategies")


def parse_coupled(data, game, device, cap):
    """Either an explicit list of joint strategies or any feasible-set constraint."""
    if isinstance(data, dict) and data.get("kind") == "explicit":
        ext = extend(game, device, cap)
        try:
            rows = data["params"]["profiles"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"explicit constraint needs params.profiles: {exc}") from exc
        return ExplicitProfiles(ext.profile([_strategy(ext, i, x) for i, x in enumerate(r)]) for r in rows)
    return generated(cons.from_dict(data, game))


def _parse_dist(text, game):
    try:
        values = json.loads(text)
    except json.JSONDecodeError:
        try:
            with open(text) as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"--dist is neither a JSON list nor a readable JSON file: {text}") from exc
    if isinstance(values, dict):
        values = values.get("p", values.get("point"))
    if not isinstance(values, list):
        raise InputError("distribution must be a JSON list")
    return check_distribution(game, [parse_number(v) for v in values])


# Commands ---------------------------------------------------------------------


def cmd_extend(args) -> int:
    game = _load_game(args)
    device = _load_device(args) or trivial_device(game.n_players)
    ext = extend(game, device, args.cap)
    _write(args, json.dumps(ext.to_dict(), indent=2))
    return EXIT_TRUE


def cmd_check(args) -> int:
    game = _load_game(args)
    eps = EPS_EQ if args.tol is None else args.tol
    if (args.profile is None) == (args.dist is None):
        raise InputError("give exactly one of --profile or --dist")
    constraint = _read_json(args.constraint, "constraint") if args.constraint else None
    if args.dist is not None:
        p = _parse_dist(args.dist, game)
        if constraint is None:
            report = is_ce_distribution(game, p, eps)
        else:
            report = is_cce_distribution(game, p, cons.from_dict(constraint, game), eps)
    else:
        device = _load_device(args) or trivial_device(game.n_players)
        profile = parse_profile(_read_json(args.profile, "profile"), game, device, args.cap)
        if constraint is None:
            report = is_correlated_equilibrium(game, device, profile, eps, args.cap)
        else:
            R = parse_coupled(constraint, game, device, args.cap)
            report = is_constrained_correlated_equilibrium(game, device, R, profile, eps, args.cap)
        out = report.to_dict()
        out["distribution"] = [format_number(v) for v in profile_distribution(game, device, profile)]
        _write(args, json.dumps(out, indent=2))
        return EXIT_TRUE if report.verdict else EXIT_FALSE
    _write(args, json.dumps(report.to_dict(), indent=2))
    return EXIT_TRUE if report.verdict else EXIT_FALSE


def cmd_explore(args) -> int:
    game = _load_game(args)
    C = cons.from_dict(_read_json(args.constraint, "constraint"), game) if args.constraint else cons.full(game)
    m = 60 if args.resolution is None else args.resolution
    cap = DEFAULT_GRID_CAP if args.cap is None else args.cap
    if args.format == "json":
        summary = explore(game, C, m, exact=args.exact, cap=cap)
        _write(args, summary_json(summary))
        return EXIT_TRUE
    if args.out in (None, "-"):
        summary = explore(game, C, m, sys.stdout, exact=args.exact, cap=cap)
    else:
        try:
            with open(args.out, "w", newline="") as fh:
                summary = explore(game, C, m, fh, exact=args.exact, cap=cap)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc.strerror}") from exc
    if args.summary:
        with open(args.summary, "w") as fh:
            fh.write(summary_json(summary) + "\n")
    log.info("classified %d points: %s", summary["points"], summary["counts"])
    return EXIT_TRUE


def cmd_fixed_point(args) -> int:
    game = _load_game(args)
    C = cons.from_dict(_read_json(args.constraint, "constraint"), game) if args.constraint else cons.full(game)
    tol = 1e-8 if args.tol is None else args.tol
    if args.dist is not None:
        result = find_fixed_point(game, C, _parse_dist(args.dist, game), args.damping, args.max_iter, tol)
    else:
        result = multi_start(game, C, args.starts, args.seed, args.damping, args.max_iter, tol)
    _write(args, json.dumps(result.to_dict(), indent=2))
    return EXIT_TRUE if result.converged else EXIT_FALSE


# Parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccelab", description="Correlated and constrained correlated equilibria of finite games.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, device=True):
        p.add_argument("--game", required=True, help="game JSON file")
        if device:
            p.add_argument("--device", help="correlation device JSON file (default: single outcome)")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("extend", help="write the extended game of a game and a device")
    common(p)
    p.add_argument("--cap", type=int, default=10**6, help="maximum number of joint strategies")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("check", help="equilibrium check for a correlated profile or a distribution")
    common(p)
    p.add_argument("--constraint", help="feasible-set or explicit coupled constraint JSON file")
    p.add_argument("--profile", help="profile JSON file")
    p.add_argument("--dist", help="distribution as a JSON list (or a JSON file)")
    p.add_argument("--tol", type=float, help="equilibrium tolerance for float inputs")
    p.add_argument("--cap", type=int, default=10**6, help="maximum number of strategies to enumerate")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("explore", help="classify a simplex grid; CSV rows or a JSON summary")
    common(p, device=False)
    p.set_defaults(format="csv")
    p.add_argument("--constraint", help="feasible-set JSON file (default: whole simplex)")
    p.add_argument("--resolution", type=int, help="grid resolution m (default 60)")
    p.add_argument("--summary", help="also write the JSON summary to this file")
    p.add_argument("--exact", action="store_true", help="classify in rational arithmetic")
    p.add_argument("--cap", type=int, help="maximum number of grid points")
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("fixed-point", help="search for a fixed point of the existence map")
    common(p, device=False)
    p.add_argument("--constraint", help="feasible-set JSON file (default: whole simplex)")
    p.add_argument("--dist", help="single start distribution; default is a seeded multi-start")
    p.add_argument("--damping", type=float, default=1.0)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--tol", type=float, help="residual tolerance (default 1e-8)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--starts", type=int, default=16)
    p.set_defaults(func=cmd_fixed_point)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_TRUE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ResourceError as exc:
        print(f"ccelab: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except CapabilityError as exc:
        print(f"ccelab: not applicable: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (InputError, ValueError, KeyError, TypeError) as exc:
        print(f"ccelab: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
