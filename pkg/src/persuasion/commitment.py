"""Optimal commitment outcomes and when equilibrium can reach them.

The commitment LP is written in joint-probability variables
``y[j][s] = prior[s] * psi(j|s)``: obedience rows then carry plain utility
differences and each state's column sums to ``prior[s]``.
"""
from __future__ import annotations

import heapq
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

from .game import (
    GameSpec,
    Outcome,
    Partition,
    best_actions,
    check_ic,
    full_revelation_outcome,
    outcome_payoffs,
    partition_payoff,
    v_lower,
)
from .numerics import LinearProgram, lp_solve

__all__ = [
    "DEFAULT_BUDGET",
    "BudgetExceededError",
    "CommitmentSolution",
    "EquilibriumCommitmentVerdict",
    "BinaryGameView",
    "GapBound",
    "build_co_lp",
    "solve_commitment",
    "commitment_outcome_is_unique",
    "find_deterministic_commitment",
    "best_ic_partition",
    "decide_commitment_in_equilibrium",
    "binary_view",
    "binary_ic_repair",
    "binary_cutoff_commitment",
    "commitment_gap_bound_check",
]

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7
# exhaustive enumeration is used below this size when method="auto"
_AUTO_ENUMERATION_LIMIT = 4096


class BudgetExceededError(RuntimeError):
    pass


@dataclass(frozen=True)
class CommitmentSolution:
    payoff: Fraction
    outcome: Outcome
    is_deterministic: bool
    ic: bool
    cutoff_state: Optional[int] = None
    cutoff_weight: Optional[Fraction] = None


@dataclass(frozen=True)
class EquilibriumCommitmentVerdict:
    attainable: bool
    witness: Optional[Partition]
    gap: Fraction
    commitment_payoff: Fraction
    best_equilibrium_payoff: Fraction
    best_partition: Partition


@dataclass(frozen=True)
class BinaryGameView:
    delta: tuple
    ru_holds: bool


class GapBound(NamedTuple):
    gap: Fraction
    bound: Fraction
    holds: bool


def _all_domains(g: GameSpec):
    return [tuple(range(g.n_actions)) for _ in range(g.n_states)]


def _ic_domains(g: GameSpec):
    # a deterministic outcome is IC iff each state's action is no lower than
    # its lowest complete-information best response
    return [tuple(range(best_actions(g, s)[0], g.n_actions)) for s in range(g.n_states)]


def _restricted_lp(g: GameSpec, domains, ic_rows=False, objective=None):
    """Commitment LP over the (action, state) pairs allowed by ``domains``.

    Returns the LP and the list of (j, s) pairs indexing its variables.
    """
    k, n = g.n_actions, g.n_states
    pairs = [(j, s) for j in range(k) for s in range(n) if j in domains[s]]
    col = {p: i for i, p in enumerate(pairs)}
    nv = len(pairs)
    rows, rhs, sense = [], [], []
    for s in range(n):
        row = [Fraction(0)] * nv
        for j in domains[s]:
            row[col[j, s]] = Fraction(1)
        rows.append(row)
        rhs.append(g.prior[s])
        sense.append("=")
    u = g.receiver_utility
    for j in range(k):
        for jj in range(k):
            if jj == j:
                continue
            row = [Fraction(0)] * nv
            for s in range(n):
                if (j, s) in col:
                    row[col[j, s]] = u[j][s] - u[jj][s]
            if any(row):
                rows.append(row)
                rhs.append(Fraction(0))
                sense.append(">=")
    if ic_rows:
        for s in range(n):
            row = [Fraction(0)] * nv
            for j in domains[s]:
                row[col[j, s]] = g.sender_payoff[j]
            rows.append(row)
            rhs.append(v_lower(g, s) * g.prior[s])
            sense.append(">=")
    if objective is None:
        c = [g.sender_payoff[j] for j, _ in pairs]
    else:
        c = [objective[j][s] for j, s in pairs]
    return LinearProgram(c, rows, rhs, sense), pairs


def _outcome_from_solution(g: GameSpec, pairs, x) -> Outcome:
    alpha = [[Fraction(0)] * g.n_states for _ in range(g.n_actions)]
    for (j, s), y in zip(pairs, x):
        alpha[j][s] = y / g.prior[s]
    return Outcome(alpha)


def build_co_lp(g: GameSpec) -> LinearProgram:
    """The commitment LP: N simplex equalities then the K(K-1) obedience rows.

    Variable ``j*N + s`` is ``prior[s] * psi(j|s)``.  Obedience rows that are
    identically zero (actions with identical utilities) are dropped.
    """
    lp, _ = _restricted_lp(g, _all_domains(g))
    return lp


def solve_commitment(g: GameSpec) -> CommitmentSolution:
    lp, pairs = _restricted_lp(g, _all_domains(g))
    res = lp_solve(lp)
    # full revelation is always obedient, so the LP is feasible and bounded
    assert res.optimal, res.status
    outcome = _outcome_from_solution(g, pairs, res.solution)
    return CommitmentSolution(
        payoff=res.value,
        outcome=outcome,
        is_deterministic=outcome.is_deterministic,
        ic=check_ic(g, outcome).passed,
    )


def commitment_outcome_is_unique(g: GameSpec) -> bool:
    """Whether the optimal face of the commitment LP is a single point.

    Minimizes and maximizes every coordinate over the optimal face.
    """
    lp, pairs = _restricted_lp(g, _all_domains(g))
    value = lp_solve(lp).value
    rows = list(lp.constraint_matrix) + [lp.objective]
    rhs = list(lp.constraint_rhs) + [value]
    sense = list(lp.constraint_sense) + ["="]
    nv = lp.variable_count
    for i in range(nv):
        e = [Fraction(0)] * nv
        e[i] = Fraction(1)
        hi = lp_solve(LinearProgram(e, rows, rhs, sense)).value
        lo = -lp_solve(LinearProgram([-x for x in e], rows, rhs, sense)).value
        if hi != lo:
            return False
    return True


def _obedient_assignment(g: GameSpec, assign) -> bool:
    k = g.n_actions
    u = g.receiver_utility
    for j in range(k):
        states = [s for s, a in enumerate(assign) if a == j]
        if not states:
            continue
        for jj in range(k):
            if jj != j and sum(g.prior[s] * (u[j][s] - u[jj][s]) for s in states) < 0:
                return False
    return True


def _enumerate_best(g, domains, target, budget):
    size = 1
    for d in domains:
        size *= len(d)
    if size > budget:
        raise BudgetExceededError(f"{size} partitions exceed the enumeration budget {budget}")
    best = None
    for assign in itertools.product(*domains):
        pay = partition_payoff(g, assign)
        if target is not None:
            if pay == target and _obedient_assignment(g, assign):
                return pay, assign
        elif (best is None or pay > best[0]) and _obedient_assignment(g, assign):
            best = (pay, assign)
    return best


def _branch_and_bound(g, domains, target, budget, incumbent=None):
    """Exact search over deterministic obedient outcomes within ``domains``.

    Best-first on the exact LP relaxation bound (deepest node first among
    ties), branching on the first state the relaxation splits.  With
    ``target`` set, returns a partition whose payoff equals it; otherwise the
    payoff-maximizing one.  ``None`` is a proof that nothing qualifies.
    """
    n = g.n_states
    floor = target if target is not None else (incumbent[0] if incumbent else None)
    heap = []
    counter = itertools.count()
    nodes = 0

    def push(doms, depth):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceededError(f"branch-and-bound exceeded {budget} LP nodes")
        lp, pairs = _restricted_lp(g, doms)
        res = lp_solve(lp)
        if not res.optimal or (floor is not None and res.value < floor):
            return
        heapq.heappush(heap, (-res.value, -depth, next(counter), doms, pairs, res.solution))

    push(list(domains), 0)
    while heap:
        neg_bound, neg_depth, _, doms, pairs, x = heapq.heappop(heap)
        bound = -neg_bound
        alloc = [[] for _ in range(n)]
        for (j, s), y in zip(pairs, x):
            if y:
                alloc[s].append((y, j))
        frac = next((s for s in range(n) if len(alloc[s]) > 1), None)
        if frac is None:
            # first integral node popped has the best bound left anywhere
            if target is not None and bound != target:
                continue
            log.debug("branch-and-bound solved %d LPs", nodes)
            return bound, tuple(alloc[s][0][1] for s in range(n))
        weights = {j: y for y, j in alloc[frac]}
        for a in sorted(doms[frac], key=lambda j: (-weights.get(j, 0), j)):
            child = list(doms)
            child[frac] = (a,)
            push(child, -neg_depth + 1)
    log.debug("branch-and-bound exhausted after %d LPs", nodes)
    if target is None:
        return incumbent
    return None


def _search(g, domains, target, budget, method, incumbent=None):
    size = 1
    for d in domains:
        size *= len(d)
    if method == "auto":
        method = "enumerate" if size <= min(budget, _AUTO_ENUMERATION_LIMIT) else "branch_and_bound"
    if method == "enumerate":
        return _enumerate_best(g, domains, target, budget)
    if method == "branch_and_bound":
        return _branch_and_bound(g, domains, target, budget, incumbent)
    raise ValueError(f"unknown search method {method!r}")


def find_deterministic_commitment(
    g: GameSpec,
    value: Optional[Fraction] = None,
    *,
    require_ic: bool = True,
    budget: int = DEFAULT_BUDGET,
    method: str = "auto",
) -> Optional[Partition]:
    """An obedient partition whose ex-ante payoff equals the commitment payoff.

    ``method="enumerate"`` scans all partitions lexicographically and returns
    the first hit; ``"branch_and_bound"`` uses exact LP bounds and scales to
    grids with dozens of states.  ``budget`` caps partitions or LP nodes.
    """
    if value is None:
        value = solve_commitment(g).payoff
    domains = _ic_domains(g) if require_ic else _all_domains(g)
    hit = _search(g, domains, value, budget, method)
    return None if hit is None else Partition(hit[1])


def best_ic_partition(g: GameSpec, *, budget: int = DEFAULT_BUDGET, method: str = "auto"):
    """Highest-payoff deterministic IC and obedient outcome, as (payoff, Partition)."""
    fr = full_revelation_outcome(g).to_partition()
    incumbent = (partition_payoff(g, fr.assign), fr.assign)
    pay, assign = _search(g, _ic_domains(g), None, budget, method, incumbent)
    return pay, Partition(assign)


def decide_commitment_in_equilibrium(
    g: GameSpec, *, budget: int = DEFAULT_BUDGET, method: str = "auto"
) -> EquilibriumCommitmentVerdict:
    v_star = solve_commitment(g).payoff
    pay, part = best_ic_partition(g, budget=budget, method=method)
    gap = v_star - pay
    return EquilibriumCommitmentVerdict(
        attainable=gap == 0,
        witness=part if gap == 0 else None,
        gap=gap,
        commitment_payoff=v_star,
        best_equilibrium_payoff=pay,
        best_partition=part,
    )


def binary_view(g: GameSpec) -> BinaryGameView:
    if g.n_actions != 2:
        raise ValueError(f"binary-action analysis needs K = 2, got K = {g.n_actions}")
    u = g.receiver_utility
    delta = tuple(u[1][s] - u[0][s] for s in range(g.n_states))
    return BinaryGameView(delta, len(set(delta)) == len(delta))


def binary_ic_repair(g: GameSpec, psi: Outcome) -> Outcome:
    """Recommend action 2 with certainty wherever it is a complete-information best response."""
    view = binary_view(g)
    alpha = [list(row) for row in psi.alpha]
    for s, d in enumerate(view.delta):
        if d >= 0:
            alpha[0][s] = Fraction(0)
            alpha[1][s] = Fraction(1)
    return Outcome(alpha)


def binary_cutoff_commitment(g: GameSpec) -> CommitmentSolution:
    """Commitment outcome of a binary game from the cutoff structure.

    States are pooled into action 2 in decreasing order of ``u(2,s)-u(1,s)``
    until the next state would break obedience; that cutoff state is mixed so
    the receiver is exactly indifferent (or fully included if she never is).
    """
    view = binary_view(g)
    if not view.ru_holds:
        raise ValueError("cutoff construction needs distinct utility differences across states")
    n = g.n_states
    delta = view.delta
    if all(d >= 0 for d in delta):
        alpha = [[Fraction(0)] * n, [Fraction(1)] * n]
        out = Outcome(alpha)
        return CommitmentSolution(g.sender_payoff[1], out, True, True)
    order = sorted(range(n), key=lambda s: -delta[s])
    to_high = [Fraction(0)] * n
    slack = Fraction(0)
    cutoff, weight = order[-1], Fraction(1)
    for s in order:
        gain = delta[s] * g.prior[s]
        if slack + gain >= 0:
            to_high[s] = Fraction(1)
            slack += gain
            continue
        cutoff = s
        weight = min(Fraction(1), slack / -gain)
        to_high[s] = weight
        break
    out = Outcome([[1 - x for x in to_high], to_high])
    _, payoff = outcome_payoffs(g, out)
    return CommitmentSolution(
        payoff=payoff,
        outcome=out,
        is_deterministic=out.is_deterministic,
        ic=check_ic(g, out).passed,
        cutoff_state=cutoff,
        cutoff_weight=weight,
    )


def commitment_gap_bound_check(g: GameSpec, *, budget: int = DEFAULT_BUDGET) -> GapBound:
    """Gap between commitment and best equilibrium payoff vs. the largest prior atom.

    The bound is scaled by ``v(2) - v(1)`` so it stays valid without
    normalizing payoffs to (0, 1).
    """
    if not binary_view(g).ru_holds:
        raise ValueError("gap bound needs distinct utility differences across states")
    gap = decide_commitment_in_equilibrium(g, budget=budget).gap
    bound = (g.sender_payoff[1] - g.sender_payoff[0]) * max(g.prior)
    return GapBound(gap, bound, gap <= bound)
