"""Perfect Bayesian equilibria of the verifiable-disclosure game.

A message is a nonempty frozenset of states; it is available in state s
iff it contains s.  The verifier enumerates the whole message lattice, so it
is limited to ``MAX_VERIFY_STATES`` states.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

from .commitment import DEFAULT_BUDGET, BudgetExceededError
from .game import (
    GameSpec,
    Outcome,
    Partition,
    best_actions,
    check_ic,
    check_obedience,
    check_outcome,
)
from .numerics import LinearProgram, lp_solve, to_fraction

__all__ = [
    "MAX_VERIFY_STATES",
    "AnalysisRefused",
    "Equilibrium",
    "SenderViolation",
    "ReceiverViolation",
    "VerificationReport",
    "all_messages",
    "skeptical_response",
    "construct_recommendation_equilibrium",
    "verify_equilibrium",
    "mixing_diagnostic",
    "enumerate_equilibrium_outcomes",
]

MAX_VERIFY_STATES = 16

ZERO = Fraction(0)
ONE = Fraction(1)


class AnalysisRefused(ValueError):
    """A constructor was handed an outcome it cannot implement."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


def all_messages(n_states: int):
    """Every nonempty subset of ``range(n_states)``, ordered by bitmask."""
    for mask in range(1, 1 << n_states):
        yield frozenset(s for s in range(n_states) if mask >> s & 1)


def _mask(m) -> int:
    return sum(1 << s for s in m)


def _dist(d):
    return tuple(to_fraction(x) for x in d)


@dataclass(frozen=True)
class Equilibrium:
    """Sender strategy, receiver strategy and beliefs.

    ``sender[s]`` maps messages to probabilities; ``receiver[m]`` and
    ``beliefs[m]`` are distributions over actions and states.  Off-path
    beliefs may be omitted, in which case the verifier asks whether any
    belief supported on the message rationalizes the receiver.
    """

    sender: tuple
    receiver: dict
    beliefs: dict = field(default_factory=dict)

    def __init__(self, sender, receiver, beliefs=None):
        object.__setattr__(
            self,
            "sender",
            tuple({frozenset(m): to_fraction(p) for m, p in dict(row).items()} for row in sender),
        )
        object.__setattr__(self, "receiver", {frozenset(m): _dist(d) for m, d in dict(receiver).items()})
        object.__setattr__(
            self, "beliefs", {frozenset(m): _dist(d) for m, d in dict(beliefs or {}).items()}
        )
        self._validate()

    def _validate(self):
        for s, row in enumerate(self.sender):
            if sum(row.values()) != 1 or any(p < 0 for p in row.values()):
                raise ValueError(f"sender strategy in state {s + 1} is not a probability distribution")
            for m, p in row.items():
                if p and s not in m:
                    raise ValueError(
                        f"state {s + 1} sends message {sorted(x + 1 for x in m)}, which omits the truth"
                    )
        for m, d in list(self.receiver.items()) + list(self.beliefs.items()):
            if not m:
                raise ValueError("empty message")
            if sum(d) != 1 or any(x < 0 for x in d):
                raise ValueError(f"distribution at message {sorted(x + 1 for x in m)} is not a probability vector")

    def on_path(self) -> set:
        return {m for row in self.sender for m, p in row.items() if p}


class SenderViolation(NamedTuple):
    state: int
    message: object
    better_message: object
    gain: Fraction


class ReceiverViolation(NamedTuple):
    message: object
    action: int
    better_action: Optional[int]
    gain: Optional[Fraction]


@dataclass(frozen=True)
class VerificationReport:
    is_equilibrium: bool
    sender_violations: tuple
    receiver_violations: tuple
    bayes_violations: tuple
    induced_outcome: Optional[Outcome]
    outcome_matches: Optional[bool] = None


def skeptical_response(g: GameSpec, m):
    """Lowest action that is a complete-information best response somewhere in m.

    Returns ``(action, support)`` where support is the set of states in m at
    which that action is a best response.
    """
    m = frozenset(m)
    if not m:
        raise ValueError("messages are nonempty")
    for i in range(g.n_actions):
        support = frozenset(s for s in m if i in best_actions(g, s))
        if support:
            return i, support
    raise AssertionError("every state has a best response")


def _uniform(states, n):
    w = Fraction(1, len(states))
    return tuple(w if s in states else ZERO for s in range(n))


def construct_recommendation_equilibrium(g: GameSpec, p: Partition) -> Equilibrium:
    """Pure-strategy equilibrium implementing a deterministic IC, obedient outcome.

    Each state sends its cell of the partition; the receiver follows the
    recommendation on path and answers every other message skeptically.
    """
    k, n = g.n_actions, g.n_states
    report = check_outcome(g, p.to_outcome(k))
    if not report.passed:
        raise AnalysisRefused(
            f"partition {p.one_based()} is not implementable: " + "; ".join(report.failures()), report
        )
    cells = p.cells(k)
    on_path = {c: j for j, c in enumerate(cells) if c}
    receiver, beliefs = {}, {}
    for m in all_messages(n):
        if m in on_path:
            j = on_path[m]
            receiver[m] = tuple(ONE if i == j else ZERO for i in range(k))
            mass = sum(g.prior[s] for s in m)
            beliefs[m] = tuple(g.prior[s] / mass if s in m else ZERO for s in range(n))
        else:
            j, support = skeptical_response(g, m)
            receiver[m] = tuple(ONE if i == j else ZERO for i in range(k))
            beliefs[m] = _uniform(support, n)
    sender = [{cells[a]: ONE} for a in p.assign]
    return Equilibrium(sender, receiver, beliefs)


def _rationalizable(g: GameSpec, m, support_actions) -> bool:
    """Is there a belief on m making every action in ``support_actions`` optimal?"""
    states = sorted(m)
    u = g.receiver_utility
    rows, rhs, sense = [[ONE] * len(states)], [ONE], ["="]
    for j in support_actions:
        for jj in range(g.n_actions):
            if jj != j:
                rows.append([u[j][s] - u[jj][s] for s in states])
                rhs.append(ZERO)
                sense.append(">=")
    return lp_solve(LinearProgram([ZERO] * len(states), rows, rhs, sense)).optimal


def verify_equilibrium(g: GameSpec, e: Equilibrium, target: Optional[Outcome] = None) -> VerificationReport:
    """Check every equilibrium condition exactly over the full message lattice."""
    k, n = g.n_actions, g.n_states
    if n > MAX_VERIFY_STATES:
        raise ValueError(f"verification enumerates 2^N messages; N = {n} exceeds {MAX_VERIFY_STATES}")
    if len(e.sender) != n:
        raise ValueError(f"sender strategy covers {len(e.sender)} states, game has {n}")
    messages = list(all_messages(n))
    missing = [m for m in messages if m not in e.receiver]
    if missing:
        raise ValueError(
            f"receiver strategy must cover every message; {len(missing)} missing, "
            f"e.g. {sorted(s + 1 for s in missing[0])}"
        )
    for d in e.receiver.values():
        if len(d) != k:
            raise ValueError("receiver distribution has the wrong number of actions")
    for d in e.beliefs.values():
        if len(d) != n:
            raise ValueError("belief has the wrong number of states")

    v, u = g.sender_payoff, g.receiver_utility
    pay = {m: sum((v[j] * e.receiver[m][j] for j in range(k)), ZERO) for m in messages}

    sender_v = []
    for s in range(n):
        available = [m for m in messages if s in m]
        best = max(available, key=lambda m: (pay[m], -_mask(m)))
        for m, p in sorted(e.sender[s].items(), key=lambda kv: _mask(kv[0])):
            if p and pay[m] < pay[best]:
                sender_v.append(SenderViolation(s, m, best, pay[best] - pay[m]))

    # posteriors for on-path messages
    mass = {}
    for s in range(n):
        for m, p in e.sender[s].items():
            if p:
                mass[m] = mass.get(m, ZERO) + g.prior[s] * p
    bayes_v = []
    posterior = {}
    for m in messages:
        if m in mass:
            q = tuple(g.prior[s] * e.sender[s].get(m, ZERO) / mass[m] for s in range(n))
            posterior[m] = q
            if m in e.beliefs and e.beliefs[m] != q:
                bayes_v.append(m)
        elif m in e.beliefs:
            if any(x for s, x in enumerate(e.beliefs[m]) if s not in m):
                bayes_v.append(m)
            posterior[m] = e.beliefs[m]

    receiver_v = []
    for m in messages:
        support = [j for j in range(k) if e.receiver[m][j]]
        q = posterior.get(m)
        if q is None:
            if not _rationalizable(g, m, support):
                receiver_v.append(ReceiverViolation(m, support[0], None, None))
            continue
        eu = [sum((u[j][s] * q[s] for s in range(n)), ZERO) for j in range(k)]
        top = max(eu)
        for j in support:
            if eu[j] < top:
                receiver_v.append(ReceiverViolation(m, j, eu.index(top), top - eu[j]))

    alpha = [
        [sum((e.receiver[m][j] * p for m, p in e.sender[s].items()), ZERO) for s in range(n)]
        for j in range(k)
    ]
    induced = Outcome(alpha)
    ok = not (sender_v or receiver_v or bayes_v)
    return VerificationReport(
        is_equilibrium=ok,
        sender_violations=tuple(sender_v),
        receiver_violations=tuple(receiver_v),
        bayes_violations=tuple(sorted(bayes_v, key=_mask)),
        induced_outcome=induced,
        outcome_matches=None if target is None else induced == target,
    )


def mixing_diagnostic(g: GameSpec, e: Equilibrium) -> dict:
    """For each state with a nondegenerate induced outcome, whether some message
    the sender uses there draws a mixed receiver response.

    In a verified equilibrium every value is True.
    """
    report = verify_equilibrium(g, e)
    out = {}
    for s in range(g.n_states):
        col = report.induced_outcome.column(s)
        if sum(1 for x in col if x) > 1:
            out[s] = any(
                sum(1 for x in e.receiver[m] if x) > 1 for m, p in e.sender[s].items() if p
            )
    return out


def enumerate_equilibrium_outcomes(
    g: GameSpec, *, budget: int = DEFAULT_BUDGET, cross_validate: bool = False
) -> list:
    """All deterministic equilibrium outcomes, i.e. the IC and obedient partitions."""
    size = g.n_actions**g.n_states
    if size > budget:
        raise BudgetExceededError(f"{size} partitions exceed the enumeration budget {budget}")
    found = []
    for assign in itertools.product(range(g.n_actions), repeat=g.n_states):
        p = Partition(assign)
        o = p.to_outcome(g.n_actions)
        if check_ic(g, o).passed and check_obedience(g, o).passed:
            if cross_validate:
                r = verify_equilibrium(g, construct_recommendation_equilibrium(g, p))
                assert r.is_equilibrium and r.induced_outcome == o, p
            found.append(p)
    return found
