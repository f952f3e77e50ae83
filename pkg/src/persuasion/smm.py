"""Equilibria of the game with a stochastic message mapping.

Alongside the state the sender sees a payoff-irrelevant label ``x`` in
[0, 1]; state s owns the label block ``X^s`` of length ``prior[s]`` and
messages are sets of labels.  Splitting each block into action-specific
sub-intervals turns any IC and obedient outcome, mixed or not, into a
pure-strategy equilibrium.

Intervals are half-open ``[lo, hi)`` except the last one, which closes at 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .equilibrium import AnalysisRefused, ReceiverViolation, SenderViolation, VerificationReport
from .game import GameSpec, Outcome, best_actions, check_outcome, v_lower
from .numerics import to_fraction

__all__ = [
    "LabelInterval",
    "SmmEquilibrium",
    "build_label_partition",
    "construct_smm_equilibrium",
    "assemble_smm_equilibrium",
    "verify_smm_equilibrium",
    "smm_payoff",
    "smm_skeptical_response",
]

ZERO = Fraction(0)


@dataclass(frozen=True)
class LabelInterval:
    lo: Fraction
    hi: Fraction
    state: int
    action: Optional[int] = None

    def __init__(self, lo, hi, state, action=None):
        object.__setattr__(self, "lo", to_fraction(lo))
        object.__setattr__(self, "hi", to_fraction(hi))
        object.__setattr__(self, "state", int(state))
        object.__setattr__(self, "action", None if action is None else int(action))
        if not 0 <= self.lo < self.hi <= 1:
            raise ValueError(f"label interval [{self.lo}, {self.hi}) is empty or leaves [0, 1]")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo


@dataclass(frozen=True)
class SmmEquilibrium:
    """Labelled sub-intervals, the pooled message ``W_j`` for each action,
    the receiver's reply to each pooled message, and posteriors ``(s, j) -> q``."""

    label_partition: tuple
    pooled_messages: dict
    receiver: dict
    posteriors: dict


def build_label_partition(prior) -> list:
    """Consecutive blocks ``X^s = [t_{s-1}, t_s)`` with ``t_s`` the cumulative prior."""
    prior = [to_fraction(p) for p in prior]
    if len(prior) < 2 or any(p <= 0 for p in prior) or sum(prior) != 1:
        raise ValueError("label partition needs a full-support prior on at least two states")
    out, t = [], ZERO
    for s, p in enumerate(prior):
        out.append(LabelInterval(t, t + p, s))
        t += p
    return out


def _pooled(intervals) -> dict:
    pooled = {}
    for iv in intervals:
        pooled.setdefault(iv.action, []).append((iv.lo, iv.hi))
    return {j: tuple(sorted(v)) for j, v in sorted(pooled.items())}


def construct_smm_equilibrium(g: GameSpec, a: Outcome) -> SmmEquilibrium:
    """Split each label block by the outcome's action probabilities.

    Within ``X^s`` actions get consecutive sub-intervals of length
    ``prior[s] * alpha[j][s]``, lowest action leftmost.

    IC only bounds the state's expected payoff.  A label routed to an action
    paying less than ``v_lower(s)`` can deviate to a message containing just
    itself, so the result verifies iff every action used in state s pays at
    least ``v_lower(s)``; :func:`verify_smm_equilibrium` reports the rest.
    """
    report = check_outcome(g, a)
    if not report.passed:
        raise AnalysisRefused("outcome is not implementable: " + "; ".join(report.failures()), report)
    intervals = []
    for block in build_label_partition(g.prior):
        s = block.state
        lo = block.lo
        for j in range(g.n_actions):
            w = a.alpha[j][s]
            if w:
                hi = lo + g.prior[s] * w
                intervals.append(LabelInterval(lo, hi, s, j))
                lo = hi
        assert lo == block.hi
    return assemble_smm_equilibrium(g, intervals)


def assemble_smm_equilibrium(g: GameSpec, intervals, receiver=None) -> SmmEquilibrium:
    """Pooled messages and Bayes posteriors for the given labelled intervals.

    ``receiver`` defaults to following every recommendation.
    """
    if receiver is None:
        receiver = {j: j for j in range(g.n_actions)}
    pooled = _pooled(intervals)
    mass = {j: sum(hi - lo for lo, hi in w) for j, w in pooled.items()}
    post = {}
    for iv in intervals:
        post[iv.state, iv.action] = post.get((iv.state, iv.action), ZERO) + iv.length / mass[iv.action]
    posteriors = {
        (s, j): post.get((s, j), ZERO) for j in pooled for s in range(g.n_states)
    }
    return SmmEquilibrium(tuple(intervals), pooled, {j: receiver[j] for j in pooled}, posteriors)


def _check_structure(g: GameSpec, e: SmmEquilibrium):
    ivs = sorted(e.label_partition, key=lambda iv: iv.lo)
    if not ivs or ivs[0].lo != 0 or ivs[-1].hi != 1:
        raise ValueError("label intervals must cover [0, 1]")
    for a, b in zip(ivs, ivs[1:]):
        if a.hi != b.lo:
            raise ValueError(f"label intervals overlap or leave a gap at {a.hi} / {b.lo}")
    blocks = build_label_partition(g.prior)
    for iv in ivs:
        if iv.action is None or not 0 <= iv.action < g.n_actions:
            raise ValueError(f"label interval [{iv.lo}, {iv.hi}) has no valid pooled message")
        if not 0 <= iv.state < g.n_states:
            raise ValueError(f"label interval [{iv.lo}, {iv.hi}) has invalid state {iv.state + 1}")
        b = blocks[iv.state]
        if iv.lo < b.lo or iv.hi > b.hi:
            raise ValueError(f"label interval [{iv.lo}, {iv.hi}) leaves the block of state {iv.state + 1}")
    if _pooled(ivs) != dict(e.pooled_messages):
        raise ValueError("pooled messages disagree with the labelled intervals")
    if set(e.receiver) != set(e.pooled_messages):
        raise ValueError("receiver must answer every pooled message")
    return ivs


def smm_skeptical_response(g: GameSpec, message) -> int:
    """Receiver's reply to an off-path label set given as ``(lo, hi)`` pairs:
    the lowest action that is a best response in some state whose block the
    set meets."""
    blocks = build_label_partition(g.prior)
    met = {
        b.state
        for b in blocks
        for lo, hi in message
        if lo < b.hi and hi > b.lo or (b.hi == 1 and lo == 1)
    }
    if not met:
        raise ValueError("message meets no label block")
    return min(best_actions(g, s)[0] for s in met)


def verify_smm_equilibrium(
    g: GameSpec, e: SmmEquilibrium, target: Optional[Outcome] = None
) -> VerificationReport:
    """Exact equilibrium check using the finite reduction of the label space.

    Payoffs depend on a label only through its interval, so each interval is
    checked once.  A label's best off-path deviation is a set containing only
    that label, answered with the state's lowest best response; on-path
    messages other than its own never contain it.
    """
    ivs = _check_structure(g, e)
    k, n = g.n_actions, g.n_states
    u, v = g.receiver_utility, g.sender_payoff

    lam = {}
    for iv in ivs:
        lam[iv.state, iv.action] = lam.get((iv.state, iv.action), ZERO) + iv.length
    receiver_v, bayes_v = [], []
    for j, w in e.pooled_messages.items():
        total = sum(hi - lo for lo, hi in w)
        q = [lam.get((s, j), ZERO) / total for s in range(n)]
        if any(e.posteriors.get((s, j), ZERO) != q[s] for s in range(n)):
            bayes_v.append(w)
        eu = [sum((u[i][s] * q[s] for s in range(n)), ZERO) for i in range(k)]
        top = max(eu)
        reply = e.receiver[j]
        if eu[reply] < top:
            receiver_v.append(ReceiverViolation(w, reply, eu.index(top), top - eu[reply]))

    sender_v = []
    for iv in ivs:
        got = v[e.receiver[iv.action]]
        floor = v_lower(g, iv.state)
        if got < floor:
            sender_v.append(
                SenderViolation(iv.state, e.pooled_messages[iv.action], ((iv.lo, iv.hi),), floor - got)
            )

    alpha = [[ZERO] * n for _ in range(k)]
    for iv in ivs:
        alpha[e.receiver[iv.action]][iv.state] += iv.length / g.prior[iv.state]
    induced = Outcome(alpha)
    return VerificationReport(
        is_equilibrium=not (sender_v or receiver_v or bayes_v),
        sender_violations=tuple(sender_v),
        receiver_violations=tuple(receiver_v),
        bayes_violations=tuple(bayes_v),
        induced_outcome=induced,
        outcome_matches=None if target is None else induced == target,
    )


def smm_payoff(g: GameSpec, e: SmmEquilibrium) -> Fraction:
    """Sender's ex-ante payoff: total label length routed to each reply."""
    return sum((g.sender_payoff[e.receiver[iv.action]] * iv.length for iv in e.label_partition), ZERO)
