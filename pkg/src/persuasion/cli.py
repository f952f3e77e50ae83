"""Command-line front end.

Exit status: 0 success, 1 when an analysis refuses its input or a check or
verification fails, 2 on usage, parse or validation errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import io
from .commitment import (
    DEFAULT_BUDGET,
    BudgetExceededError,
    binary_view,
    commitment_gap_bound_check,
    decide_commitment_in_equilibrium,
    solve_commitment,
)
from .equilibrium import (
    AnalysisRefused,
    construct_recommendation_equilibrium,
    enumerate_equilibrium_outcomes,
    verify_equilibrium,
)
from .game import GameSpec, GameValidationError, check_outcome, outcome_payoffs
from .interval import (
    MeanThresholdGame,
    discretize_game,
    evaluate_interval_outcome,
    purify_interval_outcome,
)
from .numerics import format_rational as fr
from .smm import construct_smm_equilibrium, smm_payoff, verify_smm_equilibrium

EXIT_OK, EXIT_REFUSED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, text_lines, machine):
    if args.format == "machine":
        print(json.dumps(machine))
    else:
        print("\n".join(text_lines))


def _yn(b):
    return "true" if b else "false"


def _alpha_lines(alpha):
    return [f"  action {j + 1}: " + " ".join(fr(x) for x in row) for j, row in enumerate(alpha)]


def _finite(game, verb) -> GameSpec:
    if not isinstance(game, GameSpec):
        raise UsageError(f"'{verb}' needs a finite game file (with \"states\")")
    return game


def _interval(game, verb) -> MeanThresholdGame:
    if not isinstance(game, MeanThresholdGame):
        raise UsageError(f"'{verb}' needs an interval game file (with \"cutoffs\")")
    return game


def _outcome_arg(args, g):
    if args.outcome and args.partition:
        raise UsageError("give either --outcome or --partition, not both")
    if args.outcome:
        return io.parse_outcome(io.load_json(args.outcome), args.outcome)
    if args.partition:
        return io.parse_partition(args.partition, g.n_actions).to_outcome(g.n_actions)
    return None


def _violations(report):
    lines = []
    for v in report.sender_violations:
        lines.append(f"  sender, state {v.state + 1}: gains {fr(v.gain)} by deviating")
    for v in report.receiver_violations:
        gain = "" if v.gain is None else f" (loses {fr(v.gain)})"
        lines.append(f"  receiver's action {v.action + 1} is not a best reply{gain}")
    for _ in report.bayes_violations:
        lines.append("  beliefs inconsistent with Bayes' rule or the message")
    return lines


def cmd_solve(args, game):
    g = _finite(game, "solve")
    sol = solve_commitment(g)
    text = [
        f"commitment payoff V* = {fr(sol.payoff)}",
        "optimal outcome alpha[action][state]:",
        *_alpha_lines(sol.outcome.alpha),
        f"deterministic: {_yn(sol.is_deterministic)}",
        f"IC: {_yn(sol.ic)}",
    ]
    machine = {
        "value": fr(sol.payoff),
        **io.outcome_to_json(sol.outcome),
        "deterministic": sol.is_deterministic,
        "ic": sol.ic,
    }
    _emit(args, text, machine)
    return EXIT_OK


def cmd_check(args, game):
    if isinstance(game, MeanThresholdGame):
        if not args.outcome:
            raise UsageError("'check' on an interval game needs --outcome")
        o = io.parse_interval_outcome(io.load_json(args.outcome), args.outcome)
        ev = evaluate_interval_outcome(game, o)
        text = [
            "mass per action: " + " ".join(fr(x) for x in ev.moments.mass),
            "pooled means: " + " ".join("-" if m is None else fr(m) for m in ev.moments.mean),
            f"obedient: {_yn(ev.obedient)}",
            f"IC: {_yn(ev.ic)}",
            f"ex-ante payoff: {fr(ev.ex_ante)}",
        ]
        machine = {
            "mass": [fr(x) for x in ev.moments.mass],
            "first_moment": [fr(x) for x in ev.moments.first_moment],
            "obedient": ev.obedient,
            "ic": ev.ic,
            "ex_ante": fr(ev.ex_ante),
        }
        _emit(args, text, machine)
        return EXIT_OK if ev.obedient and ev.ic else EXIT_REFUSED
    g = game
    o = _outcome_arg(args, g)
    if o is None:
        raise UsageError("'check' needs --outcome or --partition")
    rep = check_outcome(g, o)
    _, ex_ante = outcome_payoffs(g, o)
    ic_ok = all(x >= 0 for x in rep.per_state_ic_slack)
    ob_ok = all(x >= 0 for row in rep.obedience_slack for x in row)
    text = [
        f"IC: {_yn(ic_ok)}   slack per state: " + " ".join(fr(x) for x in rep.per_state_ic_slack),
        f"obedient: {_yn(ob_ok)}",
        *[f"  action {j + 1} vs others: " + " ".join(fr(x) for x in row) for j, row in enumerate(rep.obedience_slack)],
        f"ex-ante payoff: {fr(ex_ante)}",
    ]
    machine = {
        "ic": ic_ok,
        "obedient": ob_ok,
        "ic_slack": [fr(x) for x in rep.per_state_ic_slack],
        "obedience_slack": [[fr(x) for x in row] for row in rep.obedience_slack],
        "ex_ante": fr(ex_ante),
    }
    _emit(args, text, machine)
    return EXIT_OK if rep.passed else EXIT_REFUSED


def cmd_equilibrium(args, game):
    g = _finite(game, "equilibrium")
    if args.equilibrium:
        e = io.parse_equilibrium(io.load_json(args.equilibrium), args.equilibrium)
    elif args.partition:
        e = construct_recommendation_equilibrium(g, io.parse_partition(args.partition, g.n_actions))
    else:
        parts = enumerate_equilibrium_outcomes(g, budget=args.budget)
        text = [f"{len(parts)} deterministic equilibrium outcome(s):"]
        text += ["  " + ",".join(str(a) for a in p.one_based()) for p in parts]
        _emit(args, text, {"partitions": [list(p.one_based()) for p in parts]})
        return EXIT_OK
    rep = verify_equilibrium(g, e)
    _, ex_ante = outcome_payoffs(g, rep.induced_outcome)
    text = [
        f"equilibrium: {_yn(rep.is_equilibrium)}",
        *_violations(rep),
        "induced outcome alpha[action][state]:",
        *_alpha_lines(rep.induced_outcome.alpha),
        f"sender ex-ante payoff: {fr(ex_ante)}",
    ]
    machine = {
        **io.equilibrium_to_json(e),
        "is_equilibrium": rep.is_equilibrium,
        "induced_outcome": io.outcome_to_json(rep.induced_outcome)["alpha"],
        "ex_ante": fr(ex_ante),
    }
    _emit(args, text, machine)
    return EXIT_OK if rep.is_equilibrium else EXIT_REFUSED


def cmd_smm(args, game):
    g = _finite(game, "smm")
    o = _outcome_arg(args, g)
    if o is None:
        o = solve_commitment(g).outcome
    e = construct_smm_equilibrium(g, o)
    rep = verify_smm_equilibrium(g, e, target=o)
    pay = smm_payoff(g, e)
    ok = rep.is_equilibrium and rep.outcome_matches
    text = ["label intervals (lo, hi, state, action):"]
    text += [
        f"  [{fr(iv.lo)}, {fr(iv.hi)})  state {iv.state + 1}  action {iv.action + 1}" for iv in e.label_partition
    ]
    text += [
        f"pooled message for action {j + 1}: "
        + " U ".join(f"[{fr(lo)}, {fr(hi)})" for lo, hi in w)
        + "  posterior: "
        + " ".join(fr(e.posteriors[s, j]) for s in range(g.n_states))
        for j, w in e.pooled_messages.items()
    ]
    text += [f"verified SMM equilibrium: {_yn(ok)}", *_violations(rep), f"sender ex-ante payoff: {fr(pay)}"]
    machine = {**io.smm_to_json(e), "is_equilibrium": ok, "ex_ante": fr(pay), **io.outcome_to_json(o)}
    _emit(args, text, machine)
    return EXIT_OK if ok else EXIT_REFUSED


def cmd_gap(args, game):
    g = _finite(game, "gap")
    d = decide_commitment_in_equilibrium(g, budget=args.budget)
    text = [
        f"commitment payoff V* = {fr(d.commitment_payoff)}",
        f"best deterministic equilibrium payoff = {fr(d.best_equilibrium_payoff)}",
        f"attainable in equilibrium: {_yn(d.attainable)}",
        f"gap = {fr(d.gap)}",
        "witness: " + ("absent" if d.witness is None else ",".join(map(str, d.witness.one_based()))),
    ]
    machine = {
        "value": fr(d.commitment_payoff),
        "best_equilibrium_payoff": fr(d.best_equilibrium_payoff),
        "attainable": d.attainable,
        "gap": fr(d.gap),
        "witness": None if d.witness is None else list(d.witness.one_based()),
        "best_partition": list(d.best_partition.one_based()),
    }
    if g.n_actions == 2 and binary_view(g).ru_holds:
        b = commitment_gap_bound_check(g, budget=args.budget)
        text.append(f"gap bound (largest prior atom): {fr(b.bound)}  holds: {_yn(b.holds)}")
        machine["bound"] = fr(b.bound)
        machine["bound_holds"] = b.holds
    _emit(args, text, machine)
    return EXIT_OK


def cmd_purify(args, game):
    g = _interval(game, "purify")
    if not args.outcome:
        raise UsageError("'purify' needs --outcome")
    o = io.parse_interval_outcome(io.load_json(args.outcome), args.outcome)
    before = evaluate_interval_outcome(g, o)
    p = purify_interval_outcome(g, o)
    after = evaluate_interval_outcome(g, p)
    text = ["purified pieces:"]
    text += [f"  [{fr(pc.lo)}, {fr(pc.hi)})  action {pc.action + 1}" for pc in p.pieces]
    text += [
        "mass per action: " + " ".join(fr(x) for x in after.moments.mass),
        "first moment per action: " + " ".join(fr(x) for x in after.moments.first_moment),
        f"moments preserved: {_yn(before.moments == after.moments)}",
        f"obedient: {_yn(after.obedient)}  IC: {_yn(after.ic)}  ex-ante payoff: {fr(after.ex_ante)}",
    ]
    machine = {
        **io.interval_outcome_to_json(p),
        "obedient": after.obedient,
        "ic": after.ic,
        "ex_ante": fr(after.ex_ante),
    }
    _emit(args, text, machine)
    return EXIT_OK


def cmd_discretize(args, game):
    g = _interval(game, "discretize")
    if args.grid is None:
        raise UsageError("'discretize' needs --grid")
    try:
        d = discretize_game(g, args.grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "machine":
        print(json.dumps(io.game_to_json(d)))
    else:
        sol = solve_commitment(d)
        print(f"{args.grid}-state grid game; commitment payoff V*_{args.grid} = {fr(sol.payoff)}")
        print(json.dumps(io.game_to_json(d)))
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "check": cmd_check,
    "equilibrium": cmd_equilibrium,
    "smm": cmd_smm,
    "gap": cmd_gap,
    "purify": cmd_purify,
    "discretize": cmd_discretize,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="persuasion", description="Exact analysis of persuasion games with verifiable messages."
    )
    parser.add_argument("verb", choices=sorted(COMMANDS))
    parser.add_argument("game", help="game file (finite: \"states\"; interval: \"cutoffs\")")
    parser.add_argument("--format", choices=("text", "machine"), default="text")
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="partition / LP-node search cap")
    parser.add_argument("--grid", type=int, help="cells for discretize")
    parser.add_argument("--outcome", help="outcome file")
    parser.add_argument("--partition", help="comma-separated 1-based actions, one per state")
    parser.add_argument("--equilibrium", help="equilibrium file to verify")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        game = io.parse_game_file(args.game)
        return COMMANDS[args.verb](args, game)
    except AnalysisRefused as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (io.ParseError, GameValidationError, UsageError, BudgetExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # malformed but syntactically valid input (e.g. wrong dimensions)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
