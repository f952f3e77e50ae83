"""Exact rational helpers and a dense two-phase simplex solver.

Every scalar in the package is a :class:`fractions.Fraction`.  The LP solver
pivots with Bland's rule, so it terminates on degenerate problems and is
deterministic: ties are always broken toward the lowest index.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from gmpy2 import mpq

__all__ = [
    "Fraction",
    "to_fraction",
    "parse_rational",
    "format_rational",
    "LinearProgram",
    "LpResult",
    "LpValidationError",
    "lp_solve",
    "OPTIMAL",
    "INFEASIBLE",
    "UNBOUNDED",
]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

SENSES = ("<=", "=", ">=")


def to_fraction(x) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction.

    Floats are rejected: silently converting 0.7 would give a dyadic
    rational, not 7/10.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"expected int, Fraction or 'p/q' string, got {type(x).__name__}")


def parse_rational(text: str) -> Fraction:
    s = text.strip()
    if not s:
        raise ValueError("empty rational")
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"malformed rational {text!r}; expected 'p/q' or 'p'") from None
    if q == 0:
        raise ZeroDivisionError(f"zero denominator in {text!r}")
    return Fraction(p, q)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class LpValidationError(ValueError):
    pass


@dataclass(frozen=True)
class LinearProgram:
    """maximize ``objective . x`` subject to ``A x (sense) b`` and ``x >= 0``."""

    objective: tuple
    constraint_matrix: tuple
    constraint_rhs: tuple
    constraint_sense: tuple

    def __init__(self, objective, constraint_matrix, constraint_rhs, constraint_sense):
        object.__setattr__(self, "objective", tuple(to_fraction(c) for c in objective))
        object.__setattr__(
            self,
            "constraint_matrix",
            tuple(tuple(to_fraction(a) for a in row) for row in constraint_matrix),
        )
        object.__setattr__(self, "constraint_rhs", tuple(to_fraction(b) for b in constraint_rhs))
        object.__setattr__(self, "constraint_sense", tuple(constraint_sense))
        self._validate()

    @property
    def variable_count(self) -> int:
        return len(self.objective)

    def _validate(self):
        n = self.variable_count
        if n == 0:
            raise LpValidationError("LP needs at least one variable")
        m = len(self.constraint_matrix)
        if len(self.constraint_rhs) != m:
            raise LpValidationError(f"{m} constraint rows but {len(self.constraint_rhs)} rhs entries")
        if len(self.constraint_sense) != m:
            raise LpValidationError(f"{m} constraint rows but {len(self.constraint_sense)} senses")
        for i, row in enumerate(self.constraint_matrix):
            if len(row) != n:
                raise LpValidationError(f"row {i} has length {len(row)}, expected {n}")
        for i, s in enumerate(self.constraint_sense):
            if s not in SENSES:
                raise LpValidationError(f"row {i} has unknown sense {s!r}")

    def residuals(self, x: Sequence[Fraction]) -> list:
        """Row activity minus rhs, one entry per constraint."""
        return [
            sum((a * xi for a, xi in zip(row, x) if a), Fraction(0)) - b
            for row, b in zip(self.constraint_matrix, self.constraint_rhs)
        ]

    def is_feasible(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.variable_count or any(xi < 0 for xi in x):
            return False
        for r, s in zip(self.residuals(x), self.constraint_sense):
            if (s == "<=" and r > 0) or (s == ">=" and r < 0) or (s == "=" and r != 0):
                return False
        return True

    def evaluate(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * xi for c, xi in zip(self.objective, x) if c), Fraction(0))


@dataclass(frozen=True)
class LpResult:
    status: str
    value: Optional[Fraction] = None
    solution: Optional[tuple] = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _to_mpq(x: Fraction):
    return mpq(x.numerator, x.denominator)


def _from_mpq(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


class _Tableau:
    """Row-major simplex tableau; the last entry of each row is the rhs."""

    def __init__(self, rows, basis, ncols):
        self.rows = rows
        self.basis = basis
        self.ncols = ncols
        self.cost = None  # reduced-cost row, same layout as a constraint row

    def set_objective(self, c):
        # reduced costs r_j = c_j - c_B B^-1 A_j ; last entry holds -z
        r = list(c) + [mpq(0)]
        for row, b in zip(self.rows, self.basis):
            cb = c[b]
            if cb:
                for l, a in enumerate(row):
                    if a:
                        r[l] -= cb * a
        self.cost = r

    def pivot(self, i, j):
        prow = self.rows[i]
        piv = prow[j]
        if piv != 1:
            inv = 1 / piv
            prow = [a * inv if a else a for a in prow]
            self.rows[i] = prow
        nz = [l for l, a in enumerate(prow) if a]
        for k, row in enumerate(self.rows):
            if k == i:
                continue
            f = row[j]
            if f:
                for l in nz:
                    row[l] -= f * prow[l]
        f = self.cost[j]
        if f:
            for l in nz:
                self.cost[l] -= f * prow[l]
        self.basis[i] = j

    def run(self, allowed):
        """Bland's rule primal simplex on columns in ``allowed``."""
        rows, cost, basis = self.rows, self.cost, self.basis
        while True:
            j = next((l for l in allowed if cost[l] > 0), None)
            if j is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(rows):
                a = row[j]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], j)
            cost = self.cost

    def value(self):
        return -self.cost[-1]


def lp_solve(lp: LinearProgram) -> LpResult:
    """Solve ``lp`` exactly; returns a basic optimal solution when one exists.

    Two-phase simplex; the tableau is held in gmpy2 rationals for speed.
    """
    n = lp.variable_count
    zero = mpq(0)
    one = mpq(1)

    # rows with rhs 0 are written as "<=" when possible so their slack can
    # start in the basis without an artificial
    rows = []
    for row, b, s in zip(lp.constraint_matrix, lp.constraint_rhs, lp.constraint_sense):
        row = [_to_mpq(a) for a in row]
        b = _to_mpq(b)
        if b < 0 or (b == 0 and s == ">="):
            row = [-a for a in row]
            b = -b
            s = {"<=": ">=", ">=": "<=", "=": "="}[s]
        rows.append((row, b, s))

    n_slack = sum(1 for _, _, s in rows if s != "=")
    n_art = sum(1 for _, _, s in rows if s != "<=")
    ncols = n + n_slack + n_art
    slack_col = n
    art_col = n + n_slack
    tab_rows = []
    basis = []
    artificial = set()
    for row, b, s in rows:
        full = row + [zero] * (n_slack + n_art) + [b]
        if s == "<=":
            full[slack_col] = one
            basis.append(slack_col)
            slack_col += 1
        else:
            if s == ">=":
                full[slack_col] = -one
                slack_col += 1
            full[art_col] = one
            basis.append(art_col)
            artificial.add(art_col)
            art_col += 1
        tab_rows.append(full)

    tab = _Tableau(tab_rows, basis, ncols)
    if artificial:
        tab.set_objective([-one if l in artificial else zero for l in range(ncols)])
        tab.run(range(ncols))
        if tab.value() < 0:
            return LpResult(INFEASIBLE)
        # drive zero-valued artificials out of the basis, dropping redundant rows
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] in artificial:
                row = tab.rows[i]
                j = next((l for l in range(n + n_slack) if row[l]), None)
                if j is None:
                    del tab.rows[i]
                    del tab.basis[i]
                    continue
                tab.pivot(i, j)
            i += 1

    tab.set_objective([_to_mpq(c) for c in lp.objective] + [zero] * (n_slack + n_art))
    if tab.run(range(n + n_slack)) == UNBOUNDED:
        return LpResult(UNBOUNDED)
    x = [Fraction(0)] * n
    for row, b in zip(tab.rows, tab.basis):
        if b < n:
            x[b] = _from_mpq(row[-1])
    return LpResult(OPTIMAL, lp.evaluate(x), tuple(x))
