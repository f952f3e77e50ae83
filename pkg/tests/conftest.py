import random
from fractions import Fraction
from fractions import Fraction as F
from pathlib import Path

import pytest

from persuasion.game import GameSpec, validate_game

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def example1() -> GameSpec:
    # states: 1 innocent, 2 guilty; actions: 1 acquit, 2 convict
    return validate_game(GameSpec(["7/10", "3/10"], [[1, 0], [0, 1]], [0, 1]))


def random_prior(rng: random.Random, n: int, max_den: int = 12):
    d = rng.randint(n, max_den)
    cuts = sorted(rng.sample(range(1, d), n - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [d])]
    return [Fraction(p, d) for p in parts]


def random_rational(rng: random.Random, max_den: int = 12, span: int = 3):
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(-span * den, span * den), den)


def random_game(rng: random.Random, n: int, k: int, max_den: int = 12) -> GameSpec:
    # coarse utilities half the time so ties between actions are common
    if rng.random() < 0.5:
        u = [[Fraction(rng.randint(0, 2)) for _ in range(n)] for _ in range(k)]
    else:
        u = [[random_rational(rng, max_den) for _ in range(n)] for _ in range(k)]
    v, acc = [], Fraction(rng.randint(-2, 2))
    for _ in range(k):
        v.append(acc)
        acc += Fraction(rng.randint(1, max_den), rng.randint(1, max_den))
    return validate_game(GameSpec(random_prior(rng, n, max_den), u, v))


def random_binary_ru_game(rng: random.Random, n: int, max_den: int = 12, v=(0, 1)) -> GameSpec:
    while True:
        g = random_game(rng, n, 2, max_den)
        delta = [g.receiver_utility[1][s] - g.receiver_utility[0][s] for s in range(n)]
        if len(set(delta)) == n:
            return validate_game(GameSpec(g.prior, g.receiver_utility, list(v)))


@pytest.fixture
def ex1():
    return example1()


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def random_profile(g: GameSpec, rng: random.Random):
    """A random strategy profile that is often, but not always, an equilibrium.

    States are grouped into random blocks and each state sends its block (or,
    sometimes, mixes with the singleton of itself).  The receiver best-responds
    to the Bayes posterior on path, mixing among ties at random, and answers
    off-path messages with a random action and no stated belief.
    """
    from persuasion.equilibrium import Equilibrium, all_messages

    n, k = g.n_states, g.n_actions
    labels = [rng.randrange(n) for _ in range(n)]
    blocks = {s: frozenset(t for t in range(n) if labels[t] == labels[s]) for s in range(n)}
    sender = []
    for s in range(n):
        if len(blocks[s]) > 1 and rng.random() < 0.3:
            p = F(rng.randint(1, 3), 4)
            sender.append({blocks[s]: p, frozenset([s]): 1 - p})
        else:
            sender.append({blocks[s]: F(1)})
    mass = {}
    for s, row in enumerate(sender):
        for m, p in row.items():
            mass.setdefault(m, [F(0)] * n)[s] += g.prior[s] * p
    receiver, beliefs = {}, {}
    u = g.receiver_utility
    for m in all_messages(n):
        if m in mass:
            tot = sum(mass[m])
            q = tuple(x / tot for x in mass[m])
            eu = [sum(u[j][s] * q[s] for s in range(n)) for j in range(k)]
            best = [j for j in range(k) if eu[j] == max(eu)]
            if len(best) > 1 and rng.random() < 0.5:
                a, b = rng.sample(best, 2)
                dist = [F(0)] * k
                dist[a] = dist[b] = F(1, 2)
            else:
                pick = rng.choice(best)
                dist = [F(int(j == pick)) for j in range(k)]
            receiver[m] = tuple(dist)
            beliefs[m] = q
        else:
            pick = rng.randrange(k)
            receiver[m] = tuple(F(int(j == pick)) for j in range(k))
    return Equilibrium(sender, receiver, beliefs)


# acceptance criteria report one line each at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            ok, title, detail = ACCEPTANCE[n]
            terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title}  {detail}")
