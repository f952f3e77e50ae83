"""JSON file formats.  Rationals are "p/q" strings; states and actions are
1-based in files and 0-based in memory."""
from __future__ import annotations

import json
from pathlib import Path

from .equilibrium import Equilibrium
from .game import DimensionMismatchError, GameSpec, GameValidationError, Outcome, Partition, validate_game
from .interval import IntervalOutcome, MeanThresholdGame, Piece, validate_interval_game
from .numerics import format_rational, parse_rational
from .smm import SmmEquilibrium

__all__ = [
    "ParseError",
    "load_json",
    "parse_game",
    "parse_game_file",
    "game_to_json",
    "interval_game_to_json",
    "parse_outcome",
    "outcome_to_json",
    "parse_partition",
    "parse_interval_outcome",
    "interval_outcome_to_json",
    "parse_equilibrium",
    "equilibrium_to_json",
    "smm_to_json",
]


class ParseError(ValueError):
    pass


def load_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file ({exc.strerror})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    return data


def _rat(value, where):
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ParseError(f"{where}: expected a rational like \"3/7\", got {value!r}")
    try:
        return parse_rational(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: {exc}") from None


def _vec(value, where):
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected a list")
    return [_rat(x, f"{where}[{i}]") for i, x in enumerate(value)]


def _mat(value, where):
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected a list of rows")
    return [_vec(row, f"{where}[{i}]") for i, row in enumerate(value)]


def _field(data, name, where):
    if name not in data:
        raise ParseError(f"{where}: missing field {name!r}")
    return data[name]


def _fmt_vec(v):
    return [format_rational(x) for x in v]


def parse_game(data: dict, where: str = "game"):
    """A validated GameSpec, or a MeanThresholdGame if ``cutoffs`` is present."""
    if "cutoffs" in data:
        g = MeanThresholdGame(
            _vec(data["cutoffs"], f"{where}: cutoffs"),
            _vec(_field(data, "sender_payoff", where), f"{where}: sender_payoff"),
        )
        return _validated(validate_interval_game, g, where)
    states = _field(data, "states", where)
    if isinstance(states, bool) or not isinstance(states, int):
        raise ParseError(f"{where}: states must be an integer")
    prior = _vec(_field(data, "prior", where), f"{where}: prior")
    if len(prior) != states:
        raise DimensionMismatchError(f"{where}: prior has {len(prior)} entries but states = {states}")
    g = GameSpec(
        prior,
        _mat(_field(data, "receiver_utility", where), f"{where}: receiver_utility"),
        _vec(_field(data, "sender_payoff", where), f"{where}: sender_payoff"),
    )
    return _validated(validate_game, g, where)


def _validated(check, g, where):
    # keep the exception type, prefix the file name
    try:
        return check(g)
    except GameValidationError as exc:
        raise type(exc)(f"{where}: {exc}") from None


def parse_game_file(path):
    return parse_game(load_json(path), str(path))


def game_to_json(g: GameSpec) -> dict:
    return {
        "states": g.n_states,
        "prior": _fmt_vec(g.prior),
        "receiver_utility": [_fmt_vec(r) for r in g.receiver_utility],
        "sender_payoff": _fmt_vec(g.sender_payoff),
    }


def interval_game_to_json(g: MeanThresholdGame) -> dict:
    return {"cutoffs": _fmt_vec(g.cutoffs), "sender_payoff": _fmt_vec(g.sender_payoff)}


def parse_outcome(data: dict, where: str = "outcome") -> Outcome:
    try:
        return Outcome(_mat(_field(data, "alpha", where), f"{where}: alpha"))
    except (DimensionMismatchError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{where}: {exc}") from None


def outcome_to_json(o: Outcome) -> dict:
    return {"alpha": [_fmt_vec(r) for r in o.alpha]}


def parse_partition(text: str, n_actions: int | None = None) -> Partition:
    """Comma-separated 1-based actions, e.g. ``"1,2"``."""
    try:
        assign = [int(x) - 1 for x in text.split(",")]
    except ValueError:
        raise ParseError(f"partition {text!r}: expected comma-separated action numbers") from None
    if any(a < 0 or (n_actions is not None and a >= n_actions) for a in assign):
        raise ParseError(f"partition {text!r}: actions must lie in 1..{n_actions}")
    return Partition(assign)


def parse_interval_outcome(data: dict, where: str = "interval outcome") -> IntervalOutcome:
    pieces = _field(data, "pieces", where)
    if not isinstance(pieces, list):
        raise ParseError(f"{where}: pieces must be a list")
    out = []
    for i, p in enumerate(pieces):
        if not (isinstance(p, list) and len(p) == 3):
            raise ParseError(f"{where}: pieces[{i}] must be [lo, hi, weights]")
        out.append(
            Piece(_rat(p[0], f"{where}: pieces[{i}][0]"), _rat(p[1], f"{where}: pieces[{i}][1]"),
                  _vec(p[2], f"{where}: pieces[{i}][2]"))
        )
    try:
        return IntervalOutcome(out)
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None


def interval_outcome_to_json(o: IntervalOutcome) -> dict:
    return {
        "pieces": [[format_rational(p.lo), format_rational(p.hi), _fmt_vec(p.weights)] for p in o.pieces]
    }


def _message(value, where):
    if not (isinstance(value, list) and value and all(isinstance(s, int) and not isinstance(s, bool) for s in value)):
        raise ParseError(f"{where}: a message is a nonempty list of state numbers")
    return frozenset(s - 1 for s in value)


def _fmt_message(m):
    return sorted(s + 1 for s in m)


def parse_equilibrium(data: dict, where: str = "equilibrium") -> Equilibrium:
    sender_raw = _field(data, "sender", where)
    if not isinstance(sender_raw, list):
        raise ParseError(f"{where}: sender must be a per-state list")
    sender = []
    for s, row in enumerate(sender_raw):
        entries = {}
        for i, pair in enumerate(row):
            w = f"{where}: sender[{s}][{i}]"
            if not (isinstance(pair, list) and len(pair) == 2):
                raise ParseError(f"{w}: expected [message, probability]")
            entries[_message(pair[0], w)] = _rat(pair[1], w)
        sender.append(entries)

    def table(name, required):
        raw = data.get(name)
        if raw is None:
            if required:
                raise ParseError(f"{where}: missing field {name!r}")
            return {}
        out = {}
        for i, pair in enumerate(raw):
            w = f"{where}: {name}[{i}]"
            if not (isinstance(pair, list) and len(pair) == 2):
                raise ParseError(f"{w}: expected [message, distribution]")
            out[_message(pair[0], w)] = _vec(pair[1], w)
        return out

    try:
        return Equilibrium(sender, table("receiver", True), table("beliefs", False))
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None


def equilibrium_to_json(e: Equilibrium) -> dict:
    def key(m):
        return (len(m), _fmt_message(m))

    return {
        "sender": [
            [[_fmt_message(m), format_rational(p)] for m, p in sorted(row.items(), key=lambda kv: key(kv[0]))]
            for row in e.sender
        ],
        "receiver": [[_fmt_message(m), _fmt_vec(d)] for m, d in sorted(e.receiver.items(), key=lambda kv: key(kv[0]))],
        "beliefs": [[_fmt_message(m), _fmt_vec(d)] for m, d in sorted(e.beliefs.items(), key=lambda kv: key(kv[0]))],
    }


def smm_to_json(e: SmmEquilibrium) -> dict:
    return {
        "intervals": [
            [format_rational(iv.lo), format_rational(iv.hi), iv.state + 1, iv.action + 1]
            for iv in e.label_partition
        ],
        "pooled": [
            [j + 1, [[format_rational(lo), format_rational(hi)] for lo, hi in w]]
            for j, w in e.pooled_messages.items()
        ],
        "receiver": [[j + 1, a + 1] for j, a in e.receiver.items()],
        "posteriors": [
            [s + 1, j + 1, format_rational(q)] for (s, j), q in sorted(e.posteriors.items(), key=lambda kv: (kv[0][1], kv[0][0]))
        ],
    }
