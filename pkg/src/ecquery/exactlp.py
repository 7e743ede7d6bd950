"""Exact rational linear programming (two-phase simplex, Bland's rule).

Every optimal solution carries a dual vector, and :func:`certify` re-checks
primal feasibility, dual feasibility and equal objective values in exact
arithmetic.  The tableau uses gmpy2 rationals when available; results are
always returned as :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

try:
    from gmpy2 import mpq as _num
except ImportError:  # pragma: no cover
    _num = Fraction

MAX_NONZEROS = 10**6

Row = Union[Sequence, Mapping[int, object]]

_ZERO = Fraction(0)


class LPTooLarge(ValueError):
    pass


def _row_items(row: Row, width: int) -> dict[int, Fraction]:
    if isinstance(row, Mapping):
        items = {int(j): Fraction(v) for j, v in row.items() if v}
    else:
        if len(row) != width:
            raise ValueError(f"row width {len(row)} != {width}")
        items = {j: Fraction(v) for j, v in enumerate(row) if v}
    if any(not 0 <= j < width for j in items):
        raise ValueError("row index out of range")
    return items


@dataclass
class LinearProgram:
    """``min``/``max`` of ``objective . x`` subject to rows and ``x >= lower``.

    Rows may be dense sequences or sparse ``{column: coefficient}`` mappings;
    relations are ``"<="``, ``">="`` or ``"="``.
    """

    objective: Sequence
    constraints: list = field(default_factory=list)
    sense: str = "min"
    lower: Sequence | None = None

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        self.objective = [Fraction(c) for c in self.objective]
        rows = self.constraints
        self.constraints = []
        for row, rel, rhs in rows:
            self.add(row, rel, rhs)
        if self.lower is None:
            self.lower = [_ZERO] * self.width
        else:
            self.lower = [Fraction(v) for v in self.lower]
            if len(self.lower) != self.width:
                raise ValueError("lower bounds width mismatch")

    @property
    def width(self) -> int:
        return len(self.objective)

    def add(self, row: Row, rel: str, rhs) -> None:
        if rel not in ("<=", ">=", "="):
            raise ValueError(f"bad relation {rel!r}")
        self.constraints.append((_row_items(row, self.width), rel, Fraction(rhs)))

    def nonzeros(self) -> int:
        return sum(len(r) for r, _, _ in self.constraints) + sum(1 for c in self.objective if c)


@dataclass
class LPSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    primal: list[Fraction] | None = None
    dual: list[Fraction] | None = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _frac(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def _pivot(T: list[list[Fraction]], obj: list[Fraction], r: int, c: int) -> None:
    prow = T[r]
    piv = prow[c]
    if piv != 1:
        inv = 1 / piv
        for j, v in enumerate(prow):
            if v:
                prow[j] = v * inv
    nz = [j for j, v in enumerate(prow) if v]
    for k, row in enumerate(T):
        if k != r:
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
    f = obj[c]
    if f:
        for j in nz:
            obj[j] -= f * prow[j]


def _simplex(T, obj, basis, allowed: int) -> bool:
    """Minimise with reduced costs in ``obj``; columns ``>= allowed`` never enter.

    Returns False when unbounded.
    """
    rhs = len(T[0]) - 1 if T else 0
    while True:
        enter = next((j for j in range(allowed) if obj[j] < 0), None)
        if enter is None:
            return True
        best = None
        for r, row in enumerate(T):
            a = row[enter]
            if a > 0:
                key = (row[rhs] / a, basis[r])
                if best is None or key < best[0]:
                    best = (key, r)
        if best is None:
            return False
        r = best[1]
        _pivot(T, obj, r, enter)
        basis[r] = enter


def solve_lp(p: LinearProgram) -> LPSolution:
    nz = p.nonzeros()
    if nz > MAX_NONZEROS:
        raise LPTooLarge(f"program has {nz} nonzeros (limit {MAX_NONZEROS})")
    nv = p.width
    cost = list(p.objective) if p.sense == "min" else [-c for c in p.objective]
    lower = p.lower

    rows = []
    signs = []
    for items, rel, rhs in p.constraints:
        b = rhs - sum(a * lower[j] for j, a in items.items())
        s = 1
        if b < 0:
            s, b = -1, -b
            items = {j: -a for j, a in items.items()}
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
        rows.append((items, rel, b))
        signs.append(s)
    m = len(rows)

    nslack = sum(1 for _, rel, _ in rows if rel != "=")
    art0 = nv + nslack
    width = art0 + m + 1
    zero, one = _num(0), _num(1)
    T = []
    basis = []
    slack = nv
    for r, (items, rel, b) in enumerate(rows):
        row = [zero] * width
        for j, a in items.items():
            row[j] = _num(a.numerator, a.denominator)
        if rel == "<=":
            row[slack] = one
            slack += 1
        elif rel == ">=":
            row[slack] = -one
            slack += 1
        row[art0 + r] = one
        row[-1] = _num(b.numerator, b.denominator)
        T.append(row)
        basis.append(art0 + r)

    # phase 1: minimise the sum of artificials
    obj = [zero] * width
    for row in T:
        for j in range(art0):
            if row[j]:
                obj[j] -= row[j]
        obj[-1] -= row[-1]
    _simplex(T, obj, basis, art0)
    if -obj[-1] != 0:
        return LPSolution("infeasible")
    for r in range(m):
        if basis[r] >= art0:
            c = next((j for j in range(art0) if T[r][j]), None)
            if c is not None:
                _pivot(T, obj, r, c)
                basis[r] = c

    # phase 2
    full_cost = [_num(c.numerator, c.denominator) for c in cost] + [zero] * (width - nv)
    obj = list(full_cost)
    for r, row in enumerate(T):
        cb = full_cost[basis[r]]
        if cb:
            for j, v in enumerate(row):
                if v:
                    obj[j] -= cb * v
    if not _simplex(T, obj, basis, art0):
        return LPSolution("unbounded")

    x = list(lower)
    for r, j in enumerate(basis):
        if j < nv:
            x[j] += _frac(T[r][-1])
    y = []
    for r in range(m):
        col = art0 + r
        yr = sum((full_cost[basis[k]] * T[k][col] for k in range(m) if T[k][col]), zero)
        y.append(signs[r] * _frac(yr))
    value = sum((c * v for c, v in zip(p.objective, x)), _ZERO)
    if p.sense == "max":
        y = [-v for v in y]
    return LPSolution("optimal", value, x, y)


def dual_value(p: LinearProgram, y: Sequence[Fraction]) -> Fraction:
    reduced = _reduced_costs(p, y)
    return sum((rhs * yr for (_, _, rhs), yr in zip(p.constraints, y)), _ZERO) + sum(
        (l * r for l, r in zip(p.lower, reduced)), _ZERO
    )


def _reduced_costs(p: LinearProgram, y: Sequence[Fraction]) -> list[Fraction]:
    red = list(p.objective)
    for (items, _, _), yr in zip(p.constraints, y):
        if yr:
            for j, a in items.items():
                red[j] -= a * yr
    return red


def certify(p: LinearProgram, sol: LPSolution) -> bool:
    """Exact optimality check: primal feasible, dual feasible, equal objectives."""
    if not sol.optimal:
        return False
    x, y = sol.primal, sol.dual
    if len(x) != p.width or len(y) != len(p.constraints):
        return False
    if any(v < l for v, l in zip(x, p.lower)):
        return False
    for items, rel, rhs in p.constraints:
        lhs = sum((a * x[j] for j, a in items.items()), _ZERO)
        if (rel == "<=" and lhs > rhs) or (rel == ">=" and lhs < rhs) or (rel == "=" and lhs != rhs):
            return False
    sgn = 1 if p.sense == "min" else -1
    for (_, rel, _), yr in zip(p.constraints, y):
        if (rel == ">=" and sgn * yr < 0) or (rel == "<=" and sgn * yr > 0):
            return False
    if any(sgn * r < 0 for r in _reduced_costs(p, y)):
        return False
    primal = sum((c * v for c, v in zip(p.objective, x)), _ZERO)
    return primal == sol.value == dual_value(p, y)
