"""Games on the state space [0, 1] with a uniform prior and mean-threshold receivers.

The receiver's best action depends only on the posterior mean: action j is
optimal iff ``cutoffs[j] <= mean <= cutoffs[j+1]``.  Outcomes are piecewise
constant, so every integral is a closed-form rational.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .game import GameSpec, GameValidationError, NonIncreasingPayoffError, Partition, validate_game
from .numerics import to_fraction

__all__ = [
    "UnsupportedConfigurationError",
    "MeanThresholdGame",
    "Piece",
    "IntervalOutcome",
    "MomentSummary",
    "IntervalEvaluation",
    "validate_interval_game",
    "evaluate_interval_outcome",
    "purify_interval_outcome",
    "discretize_game",
    "grid_partition_outcome",
    "full_revelation_interval_outcome",
]

ZERO = Fraction(0)
ONE = Fraction(1)


class UnsupportedConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class MeanThresholdGame:
    cutoffs: tuple
    sender_payoff: tuple

    def __init__(self, cutoffs, sender_payoff):
        object.__setattr__(self, "cutoffs", tuple(to_fraction(c) for c in cutoffs))
        object.__setattr__(self, "sender_payoff", tuple(to_fraction(v) for v in sender_payoff))

    @property
    def n_actions(self) -> int:
        return len(self.sender_payoff)

    def region(self, j: int):
        """Complete-information action set ``[c_j, c_{j+1}]`` of action j."""
        return self.cutoffs[j], self.cutoffs[j + 1]

    def v_lower_at(self, x: Fraction) -> Fraction:
        j = next(i for i in range(self.n_actions) if self.cutoffs[i] <= x <= self.cutoffs[i + 1])
        return self.sender_payoff[j]


def validate_interval_game(g: MeanThresholdGame) -> MeanThresholdGame:
    k = g.n_actions
    c = g.cutoffs
    if k < 2:
        raise GameValidationError(f"need at least 2 actions, got {k}")
    if len(c) != k + 1:
        raise GameValidationError(f"{k} actions need {k + 1} cutoffs, got {len(c)}")
    if c[0] != 0 or c[-1] != 1:
        raise GameValidationError("cutoffs must start at 0 and end at 1")
    if any(a > b for a, b in zip(c, c[1:])):
        raise GameValidationError("cutoffs must be nondecreasing")
    if any(a >= b for a, b in zip(g.sender_payoff, g.sender_payoff[1:])):
        raise NonIncreasingPayoffError("sender_payoff not strictly increasing")
    return g


@dataclass(frozen=True)
class Piece:
    lo: Fraction
    hi: Fraction
    weights: tuple

    def __init__(self, lo, hi, weights):
        object.__setattr__(self, "lo", to_fraction(lo))
        object.__setattr__(self, "hi", to_fraction(hi))
        object.__setattr__(self, "weights", tuple(to_fraction(w) for w in weights))

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def first_moment(self) -> Fraction:
        return (self.hi * self.hi - self.lo * self.lo) / 2

    @property
    def action(self) -> Optional[int]:
        """The action played with certainty, or None for a mixed piece."""
        hits = [j for j, w in enumerate(self.weights) if w == 1]
        return hits[0] if hits else None


@dataclass(frozen=True)
class IntervalOutcome:
    """Pieces ``[lo, hi)`` tiling [0, 1] in order, each with an action distribution."""

    pieces: tuple

    def __init__(self, pieces):
        pieces = tuple(p if isinstance(p, Piece) else Piece(*p) for p in pieces)
        object.__setattr__(self, "pieces", pieces)
        self._validate()

    def _validate(self):
        if not self.pieces:
            raise ValueError("interval outcome has no pieces")
        if self.pieces[0].lo != 0 or self.pieces[-1].hi != 1:
            raise ValueError("pieces must cover [0, 1]")
        k = len(self.pieces[0].weights)
        for a, b in zip(self.pieces, self.pieces[1:]):
            if a.hi != b.lo:
                raise ValueError(f"pieces are not contiguous at {a.hi} / {b.lo}")
        for p in self.pieces:
            if p.lo >= p.hi:
                raise ValueError(f"empty piece [{p.lo}, {p.hi})")
            if len(p.weights) != k:
                raise ValueError("pieces disagree on the number of actions")
            if any(w < 0 for w in p.weights) or sum(p.weights) != 1:
                raise ValueError(f"weights on [{p.lo}, {p.hi}) are not a probability vector")

    @property
    def n_actions(self) -> int:
        return len(self.pieces[0].weights)

    @property
    def is_deterministic(self) -> bool:
        return all(p.action is not None for p in self.pieces)

    def merged(self) -> "IntervalOutcome":
        """Join adjacent pieces with identical weights."""
        out = [self.pieces[0]]
        for p in self.pieces[1:]:
            if p.weights == out[-1].weights:
                out[-1] = Piece(out[-1].lo, p.hi, p.weights)
            else:
                out.append(p)
        return IntervalOutcome(out)

    @classmethod
    def from_cells(cls, cells, n_actions: int) -> "IntervalOutcome":
        """Deterministic outcome from ``(lo, hi, action)`` triples."""
        return cls(
            Piece(lo, hi, [ONE if j == a else ZERO for j in range(n_actions)]) for lo, hi, a in cells
        )


@dataclass(frozen=True)
class MomentSummary:
    mass: tuple
    first_moment: tuple

    @property
    def mean(self) -> tuple:
        return tuple(f / m if m else None for m, f in zip(self.mass, self.first_moment))


@dataclass(frozen=True)
class IntervalEvaluation:
    moments: MomentSummary
    obedient: bool
    ic: bool
    ex_ante: Fraction


def _moments(o: IntervalOutcome) -> MomentSummary:
    k = o.n_actions
    mass = [ZERO] * k
    mom = [ZERO] * k
    for p in o.pieces:
        L, F = p.length, p.first_moment
        for j, w in enumerate(p.weights):
            if w:
                mass[j] += w * L
                mom[j] += w * F
    return MomentSummary(tuple(mass), tuple(mom))


def _max_v_lower(g: MeanThresholdGame, lo, hi):
    """Largest worst-case complete-information payoff on the piece ``[lo, hi)``.

    The lowest best response is action 0 on ``[0, c_1]`` and action i on
    ``(c_i, c_{i+1}]``.
    """
    c = g.cutoffs
    best = None
    for i in range(g.n_actions):
        a, b = c[i], c[i + 1]
        if i == 0:
            hit = lo <= b
        else:
            hit = a < b and hi > a and lo <= b
        if hit:
            best = g.sender_payoff[i]
    return best


def evaluate_interval_outcome(g: MeanThresholdGame, o: IntervalOutcome) -> IntervalEvaluation:
    """Exact moments, obedience, IC and ex-ante payoff of a piecewise outcome.

    Obedience compares each pooled mean with the action's cutoff interval.
    IC is checked pointwise on every half-open piece against the step
    function of worst complete-information payoffs, which is nondecreasing,
    so the check is exact and no endpoint can hide a violation.
    """
    if o.n_actions != g.n_actions:
        raise ValueError(f"outcome has {o.n_actions} actions, game has {g.n_actions}")
    ms = _moments(o)
    obedient = True
    for j, mean in enumerate(ms.mean):
        if mean is not None:
            lo, hi = g.region(j)
            obedient = obedient and lo <= mean <= hi
    ic = True
    for p in o.pieces:
        floor = _max_v_lower(g, p.lo, p.hi)
        ic = ic and all(g.sender_payoff[j] >= floor for j, w in enumerate(p.weights) if w)
    ex_ante = sum((v * m for v, m in zip(g.sender_payoff, ms.mass)), ZERO)
    return IntervalEvaluation(ms, obedient, ic, ex_ante)


def _centered_split(lo, hi, weights):
    """Nested symmetric allocation of one piece; highest action innermost.

    Every allocated set is symmetric about the piece midpoint, so its first
    moment is exactly its weight times the piece's first moment.
    """
    mid = (lo + hi) / 2
    L = hi - lo
    cells = []
    inner = ZERO  # half-width already allocated
    for j in reversed(range(len(weights))):
        w = weights[j]
        if not w:
            continue
        outer = inner + w * L / 2
        if inner == 0:
            cells.append((mid - outer, mid + outer, j))
        else:
            cells.append((mid - outer, mid - inner, j))
            cells.append((mid + inner, mid + outer, j))
        inner = outer
    return sorted(cells)


def purify_interval_outcome(
    g: MeanThresholdGame, o: IntervalOutcome, *, prior: str = "uniform"
) -> IntervalOutcome:
    """Deterministic outcome with the same mass and first moment for every action.

    Under a uniform prior and mean-threshold preferences those two integrals
    fix obedience and the sender's ex-ante payoff, so both carry over
    exactly.  IC is not preserved in general; re-evaluate the result.
    """
    if prior != "uniform":
        raise UnsupportedConfigurationError(f"purification supports only the uniform prior, got {prior!r}")
    if o.n_actions != g.n_actions:
        raise ValueError(f"outcome has {o.n_actions} actions, game has {g.n_actions}")
    cells = []
    for p in o.pieces:
        if p.action is not None:
            cells.append((p.lo, p.hi, p.action))
        else:
            cells.extend(_centered_split(p.lo, p.hi, p.weights))
    return IntervalOutcome.from_cells(cells, g.n_actions).merged()


def discretize_game(g: MeanThresholdGame, n: int) -> GameSpec:
    """n equally likely states at the cell midpoints of a uniform grid.

    Receiver utility ``u(j, x) = sum_{i<=j} (x - c_i)`` (interior cutoffs only)
    is affine in x, so expected utility depends only on the posterior mean
    and the optimal action switches exactly at the cutoffs.
    """
    if n < 2:
        raise ValueError(f"grid needs at least 2 cells, got {n}")
    k = g.n_actions
    xs = [Fraction(2 * i + 1, 2 * n) for i in range(n)]
    u = []
    for j in range(k):
        u.append([sum((x - g.cutoffs[i] for i in range(1, j + 1)), ZERO) for x in xs])
    return validate_game(GameSpec([Fraction(1, n)] * n, u, g.sender_payoff))


def grid_partition_outcome(p: Partition, n_actions: int) -> IntervalOutcome:
    """Lift a partition of an n-point grid to the continuum, cell by cell."""
    n = len(p.assign)
    cells = [(Fraction(i, n), Fraction(i + 1, n), a) for i, a in enumerate(p.assign)]
    return IntervalOutcome.from_cells(cells, n_actions).merged()


def full_revelation_interval_outcome(g: MeanThresholdGame) -> IntervalOutcome:
    cells = []
    for j in range(g.n_actions):
        lo, hi = g.region(j)
        if lo < hi:
            cells.append((lo, hi, j))
    return IntervalOutcome.from_cells(cells, g.n_actions)
