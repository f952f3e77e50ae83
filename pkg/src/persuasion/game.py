"""Finite persuasion games, outcomes, and the IC / obedience tests.

States and actions are 0-based in the Python API.  Text formats (files,
CLI, reports) use 1-based indices.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .numerics import to_fraction

__all__ = [
    "GameValidationError",
    "DimensionMismatchError",
    "PriorMassError",
    "ZeroProbabilityStateError",
    "NonIncreasingPayoffError",
    "GameSpec",
    "Outcome",
    "Partition",
    "CheckReport",
    "validate_game",
    "best_actions",
    "v_lower",
    "outcome_payoffs",
    "check_ic",
    "check_obedience",
    "check_outcome",
    "full_revelation_outcome",
]


class GameValidationError(ValueError):
    """Base class for malformed game data."""


class DimensionMismatchError(GameValidationError):
    pass


class PriorMassError(GameValidationError):
    pass


class ZeroProbabilityStateError(GameValidationError):
    pass


class NonIncreasingPayoffError(GameValidationError):
    pass


@dataclass(frozen=True)
class GameSpec:
    """Prior over N states, receiver utility ``u[j][s]`` and sender payoff ``v[j]``.

    Construction does not validate; use :func:`validate_game`.
    """

    prior: tuple
    receiver_utility: tuple
    sender_payoff: tuple

    def __init__(self, prior, receiver_utility, sender_payoff):
        object.__setattr__(self, "prior", tuple(to_fraction(p) for p in prior))
        object.__setattr__(
            self,
            "receiver_utility",
            tuple(tuple(to_fraction(x) for x in row) for row in receiver_utility),
        )
        object.__setattr__(self, "sender_payoff", tuple(to_fraction(x) for x in sender_payoff))

    @property
    def n_states(self) -> int:
        return len(self.prior)

    @property
    def n_actions(self) -> int:
        return len(self.sender_payoff)

    def u(self, j: int, s: int) -> Fraction:
        return self.receiver_utility[j][s]


def validate_game(g: GameSpec) -> GameSpec:
    n, k = g.n_states, g.n_actions
    if n < 2:
        raise DimensionMismatchError(f"need at least 2 states, got {n}")
    if k < 2:
        raise DimensionMismatchError(f"need at least 2 actions, got {k}")
    if len(g.receiver_utility) != k:
        raise DimensionMismatchError(
            f"receiver_utility has {len(g.receiver_utility)} rows but sender_payoff has {k} actions"
        )
    for j, row in enumerate(g.receiver_utility):
        if len(row) != n:
            raise DimensionMismatchError(f"receiver_utility row {j + 1} has {len(row)} entries, expected {n}")
    for s, p in enumerate(g.prior):
        if p <= 0:
            raise ZeroProbabilityStateError(f"prior of state {s + 1} is {p}; every state needs positive mass")
    mass = sum(g.prior)
    if mass != 1:
        raise PriorMassError(f"prior mass {mass} != 1")
    for j in range(k - 1):
        if g.sender_payoff[j] >= g.sender_payoff[j + 1]:
            raise NonIncreasingPayoffError(
                f"sender_payoff not strictly increasing at actions {j + 1},{j + 2}"
            )
    return g


@dataclass(frozen=True)
class Outcome:
    """``alpha[j][s]``: probability the receiver takes action j in state s."""

    alpha: tuple

    def __init__(self, alpha):
        object.__setattr__(self, "alpha", tuple(tuple(to_fraction(x) for x in row) for row in alpha))
        self._validate()

    def _validate(self):
        if not self.alpha or not self.alpha[0]:
            raise DimensionMismatchError("empty outcome")
        n = len(self.alpha[0])
        if any(len(row) != n for row in self.alpha):
            raise DimensionMismatchError("outcome rows differ in length")
        for s in range(n):
            col = [row[s] for row in self.alpha]
            if any(x < 0 or x > 1 for x in col) or sum(col) != 1:
                raise ValueError(f"outcome column for state {s + 1} is not a probability vector")

    @property
    def n_actions(self) -> int:
        return len(self.alpha)

    @property
    def n_states(self) -> int:
        return len(self.alpha[0])

    def column(self, s: int) -> tuple:
        return tuple(row[s] for row in self.alpha)

    @property
    def is_deterministic(self) -> bool:
        return all(x in (0, 1) for row in self.alpha for x in row)

    def to_partition(self) -> Optional["Partition"]:
        if not self.is_deterministic:
            return None
        return Partition(tuple(self.column(s).index(1) for s in range(self.n_states)))

    @classmethod
    def from_partition(cls, p: "Partition", n_actions: int) -> "Outcome":
        return p.to_outcome(n_actions)


@dataclass(frozen=True)
class Partition:
    """Deterministic outcome: ``assign[s]`` is the action taken in state s."""

    assign: tuple

    def __init__(self, assign):
        object.__setattr__(self, "assign", tuple(int(a) for a in assign))

    def cells(self, n_actions: int) -> list:
        """W_j as frozensets of states, one per action (possibly empty)."""
        out = [set() for _ in range(n_actions)]
        for s, a in enumerate(self.assign):
            out[a].add(s)
        return [frozenset(c) for c in out]

    def to_outcome(self, n_actions: int) -> Outcome:
        if any(a < 0 or a >= n_actions for a in self.assign):
            raise ValueError(f"partition {self.one_based()} uses an action outside 1..{n_actions}")
        return Outcome(
            [[Fraction(1) if a == j else Fraction(0) for a in self.assign] for j in range(n_actions)]
        )

    def one_based(self) -> tuple:
        return tuple(a + 1 for a in self.assign)


@dataclass(frozen=True)
class CheckReport:
    passed: bool
    per_state_ic_slack: Optional[tuple] = None
    obedience_slack: Optional[tuple] = None

    def failures(self) -> list:
        """Human-readable list of the negative slacks (1-based indices)."""
        out = []
        if self.per_state_ic_slack is not None:
            out += [
                f"IC fails at state {s + 1} (slack {x})"
                for s, x in enumerate(self.per_state_ic_slack)
                if x < 0
            ]
        if self.obedience_slack is not None:
            out += [
                f"obedience fails for action {j + 1} against {jj + 1} (slack {x})"
                for j, row in enumerate(self.obedience_slack)
                for jj, x in enumerate(row)
                if x < 0
            ]
        return out


def _check_dims(g: GameSpec, a: Outcome):
    if a.n_actions != g.n_actions or a.n_states != g.n_states:
        raise DimensionMismatchError(
            f"outcome is {a.n_actions}x{a.n_states} but game is {g.n_actions}x{g.n_states}"
        )


def best_actions(g: GameSpec, s: int) -> tuple:
    """Complete-information best responses in state s, ascending."""
    col = [row[s] for row in g.receiver_utility]
    top = max(col)
    return tuple(j for j, x in enumerate(col) if x == top)


def v_lower(g: GameSpec, s: int) -> Fraction:
    """Sender's worst complete-information payoff in state s."""
    return min(g.sender_payoff[j] for j in best_actions(g, s))


def outcome_payoffs(g: GameSpec, a: Outcome):
    """Return ``(interim, ex_ante)`` sender payoffs of outcome ``a``."""
    _check_dims(g, a)
    interim = tuple(
        sum((g.sender_payoff[j] * a.alpha[j][s] for j in range(g.n_actions)), Fraction(0))
        for s in range(g.n_states)
    )
    ex_ante = sum((p * x for p, x in zip(g.prior, interim)), Fraction(0))
    return interim, ex_ante


def check_ic(g: GameSpec, a: Outcome) -> CheckReport:
    interim, _ = outcome_payoffs(g, a)
    slack = tuple(interim[s] - v_lower(g, s) for s in range(g.n_states))
    return CheckReport(all(x >= 0 for x in slack), per_state_ic_slack=slack)


def obedience_slack(g: GameSpec, a: Outcome) -> tuple:
    _check_dims(g, a)
    k, n = g.n_actions, g.n_states
    u = g.receiver_utility
    return tuple(
        tuple(
            sum(((u[j][s] - u[jj][s]) * a.alpha[j][s] * g.prior[s] for s in range(n)), Fraction(0))
            for jj in range(k)
        )
        for j in range(k)
    )


def check_obedience(g: GameSpec, a: Outcome) -> CheckReport:
    slack = obedience_slack(g, a)
    return CheckReport(all(x >= 0 for row in slack for x in row), obedience_slack=slack)


def check_outcome(g: GameSpec, a: Outcome) -> CheckReport:
    """IC and obedience together."""
    ic = check_ic(g, a)
    ob = check_obedience(g, a)
    return CheckReport(ic.passed and ob.passed, ic.per_state_ic_slack, ob.obedience_slack)


def full_revelation_outcome(g: GameSpec) -> Outcome:
    """Reveal every state; the receiver breaks ties toward the lowest action."""
    return Partition(best_actions(g, s)[0] for s in range(g.n_states)).to_outcome(g.n_actions)


def partition_payoff(g: GameSpec, assign: Sequence[int]) -> Fraction:
    return sum((g.prior[s] * g.sender_payoff[a] for s, a in enumerate(assign)), Fraction(0))
