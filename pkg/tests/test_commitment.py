import itertools
import random
from fractions import Fraction as F

import pytest

from conftest import random_binary_ru_game, random_game
from persuasion.commitment import (
    BudgetExceededError,
    binary_cutoff_commitment,
    binary_ic_repair,
    binary_view,
    build_co_lp,
    commitment_gap_bound_check,
    commitment_outcome_is_unique,
    decide_commitment_in_equilibrium,
    find_deterministic_commitment,
    solve_commitment,
)
from persuasion.game import (
    GameSpec,
    Outcome,
    Partition,
    check_ic,
    check_obedience,
    full_revelation_outcome,
    obedience_slack,
    outcome_payoffs,
    validate_game,
)
from persuasion.numerics import lp_solve


def dominant_high():
    # action 2 is the receiver's unique best response in every state
    return validate_game(GameSpec(["1/3", "2/3"], [[0, 1], [1, 3]], [0, 1]))


def brute_force_best_ic(g):
    """Independent oracle: scan every partition with the game-level checks."""
    best = None
    for assign in itertools.product(range(g.n_actions), repeat=g.n_states):
        o = Partition(assign).to_outcome(g.n_actions)
        if check_ic(g, o).passed and check_obedience(g, o).passed:
            pay = outcome_payoffs(g, o)[1]
            best = pay if best is None or pay > best else best
    return best


def test_co_lp_shape(ex1):
    lp = build_co_lp(ex1)
    assert lp.variable_count == 4
    assert lp.constraint_sense.count("=") == 2
    assert lp.constraint_sense.count(">=") == 2
    assert lp_solve(lp).value == F(3, 5)


def test_example1_commitment(ex1):
    sol = solve_commitment(ex1)
    assert sol.payoff == F(3, 5)
    assert sol.outcome == Outcome([["4/7", 0], ["3/7", 1]])
    assert not sol.is_deterministic and sol.ic
    assert commitment_outcome_is_unique(ex1)


def test_example1_no_deterministic_commitment(ex1):
    for method in ("enumerate", "branch_and_bound"):
        assert find_deterministic_commitment(ex1, method=method) is None
        assert find_deterministic_commitment(ex1, require_ic=False, method=method) is None
    v = decide_commitment_in_equilibrium(ex1)
    assert not v.attainable and v.witness is None
    assert v.gap == F(3, 10) and v.best_partition == Partition((0, 1))


def test_dominant_action_pools():
    g = dominant_high()
    sol = solve_commitment(g)
    assert sol.payoff == 1 and sol.is_deterministic and sol.ic
    assert find_deterministic_commitment(g) == Partition((1, 1))
    v = decide_commitment_in_equilibrium(g)
    assert v.attainable and v.gap == 0 and v.witness == Partition((1, 1))
    assert commitment_gap_bound_check(g) == (0, F(2, 3), True)
    cut = binary_cutoff_commitment(g)
    assert cut.payoff == 1 and cut.outcome == Partition((1, 1)).to_outcome(2)


def test_enumeration_budget(ex1):
    with pytest.raises(BudgetExceededError):
        find_deterministic_commitment(ex1, require_ic=False, budget=3, method="enumerate")
    # IC pins state 2 to action 2, leaving only two candidates
    assert find_deterministic_commitment(ex1, budget=2, method="enumerate") is None


def test_binary_repair(ex1):
    a = solve_commitment(ex1).outcome
    assert binary_ic_repair(ex1, a) == a
    half = Outcome([["6/7", "1/2"], ["1/7", "1/2"]])
    fixed = binary_ic_repair(ex1, half)
    assert fixed.alpha[1] == (F(1, 7), 1)
    assert obedience_slack(ex1, fixed)[1][0] >= obedience_slack(ex1, half)[1][0]
    # no state where the high action is a best response: nothing to repair
    low = validate_game(GameSpec(["1/2", "1/2"], [[1, 2], [0, 0]], [0, 1]))
    pool = Outcome([[0, 0], [1, 1]])
    assert binary_ic_repair(low, pool) == pool


def test_binary_cutoff(ex1):
    assert binary_view(ex1).delta == (-1, 1)
    c = binary_cutoff_commitment(ex1)
    assert (c.payoff, c.cutoff_state, c.cutoff_weight) == (F(3, 5), 0, F(3, 7))
    even = validate_game(GameSpec(["1/2", "1/2"], [[1, 0], [0, 1]], [0, 1]))
    c = binary_cutoff_commitment(even)
    assert (c.payoff, c.cutoff_state, c.cutoff_weight) == (1, 0, 1)
    with pytest.raises(ValueError):
        binary_cutoff_commitment(validate_game(GameSpec(["1/2", "1/2"], [[0, 0], [1, 1]], [0, 1])))
    with pytest.raises(ValueError):
        binary_view(validate_game(GameSpec(["1/2", "1/2"], [[0, 0], [1, 1], [2, 2]], [0, 1, 2])))


def test_gap_bound_example1(ex1):
    assert commitment_gap_bound_check(ex1) == (F(3, 10), F(7, 10), True)


def test_gap_bound_ten_uniform_states():
    rng = random.Random(7)
    n = 10
    for _ in range(25):
        deltas = rng.sample(range(-20, 21), n)
        g = validate_game(GameSpec([F(1, n)] * n, [[0] * n, [F(d, 4) for d in deltas]], [0, 1]))
        gap, bound, holds = commitment_gap_bound_check(g)
        assert bound == F(1, 10) and holds
        assert gap == solve_commitment(g).payoff - brute_force_best_ic(g)


def test_search_methods_agree_with_oracle():
    rng = random.Random(11)
    for _ in range(60):
        g = random_game(rng, rng.randint(2, 5), rng.randint(2, 3))
        best = brute_force_best_ic(g)
        v_star = solve_commitment(g).payoff
        verdicts = [decide_commitment_in_equilibrium(g, method=m) for m in ("enumerate", "branch_and_bound")]
        for v in verdicts:
            assert v.best_equilibrium_payoff == best
            assert v.gap == v_star - best
            assert v.attainable == (v.gap == 0) == (v.witness is not None)
        for ic in (True, False):
            hits = [find_deterministic_commitment(g, require_ic=ic, method=m)
                    for m in ("enumerate", "branch_and_bound")]
            assert (hits[0] is None) == (hits[1] is None)
            for p in hits:
                if p is not None:
                    o = p.to_outcome(g.n_actions)
                    assert check_obedience(g, o).passed and outcome_payoffs(g, o)[1] == v_star
                    assert check_ic(g, o).passed or not ic


def test_commitment_invariants():
    rng = random.Random(3)
    for _ in range(80):
        g = random_game(rng, rng.randint(2, 4), rng.randint(2, 3))
        sol = solve_commitment(g)
        assert check_obedience(g, sol.outcome).passed
        assert outcome_payoffs(g, sol.outcome)[1] == sol.payoff
        assert sol.payoff >= outcome_payoffs(g, full_revelation_outcome(g))[1]
        for _ in range(5):
            o = Partition([rng.randrange(g.n_actions) for _ in range(g.n_states)]).to_outcome(g.n_actions)
            if check_obedience(g, o).passed:
                assert outcome_payoffs(g, o)[1] <= sol.payoff


def test_binary_properties_random():
    rng = random.Random(5)
    for _ in range(60):
        g = random_binary_ru_game(rng, rng.randint(2, 6), v=(rng.randint(-3, 0), rng.randint(1, 4)))
        sol = solve_commitment(g)
        assert binary_cutoff_commitment(g).payoff == sol.payoff
        fixed = binary_ic_repair(g, sol.outcome)
        assert check_ic(g, fixed).passed and check_obedience(g, fixed).passed
        assert outcome_payoffs(g, fixed)[1] == sol.payoff
        assert commitment_gap_bound_check(g).holds
