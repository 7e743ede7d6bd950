"""Expectational certificate complexity: feasibility, constructions and bounds.

EC is a bilinear (nonconvex) program, so it is only ever reported as an
interval ``[FC(f), best feasible scheme found]``.  Schemes built from
certificates or FC solutions are exact rationals; the square-root construction
is binary64 and checked with a small slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .boolfn import BooleanFunction, bits_of
from .exactlp import LinearProgram, certify, solve_lp
from .measures import (
    FCScheme,
    PairViolation,
    certificate_complexity,
    fractional_certificate,
    is_fc_feasible,
    sensitivity,
)

FLOAT_SLACK = 1e-9


class InfeasibleScheme(ValueError):
    pass


@dataclass(frozen=True)
class WeightScheme:
    """Per-input weight vectors ``w_x`` with entries in [0, 1].

    ``exact`` schemes hold Fractions; the others hold floats.
    """

    n: int
    weights: tuple[tuple, ...]
    exact: bool = True

    def __post_init__(self):
        if len(self.weights) != 1 << self.n or any(len(w) != self.n for w in self.weights):
            raise ValueError("scheme must have one length-n vector per input")

    def row_sum(self, x: int):
        return sum(self.weights[x], Fraction(0) if self.exact else 0.0)

    @property
    def value(self):
        if not self.weights:
            return Fraction(0) if self.exact else 0.0
        return max(self.row_sum(x) for x in range(1 << self.n))

    def as_float(self) -> WeightScheme:
        return WeightScheme(self.n, tuple(tuple(float(v) for v in w) for w in self.weights), False)

    @classmethod
    def zeros(cls, n: int) -> WeightScheme:
        return cls(n, tuple((Fraction(0),) * n for _ in range(1 << n)), True)


def validate_entries(W: WeightScheme) -> None:
    for x, w in enumerate(W.weights):
        for v in w:
            if not 0 <= v <= 1:
                raise ValueError(f"weight {v} of input {x} outside [0, 1]")


def check_ec_feasible(
    f: BooleanFunction, W: WeightScheme, slack: float = 0
) -> PairViolation | None:
    """First opposite pair (index order) with ``sum w_x(i) w_y(i) < 1 - slack``."""
    if f.n > 10:
        raise ValueError("check_ec_feasible supports n <= 10")
    if W.n != f.n:
        raise ValueError("scheme arity does not match function")
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    if W.exact and slack != 0:
        raise ValueError("exact schemes are checked with zero slack")
    validate_entries(W)
    w = W.weights
    zero = Fraction(0) if W.exact else 0.0
    need = 1 - slack
    diff_bits = {}
    for x in range(f.size):
        fx = f(x)
        wx = w[x]
        for y in range(x + 1, f.size):
            if f(y) == fx:
                continue
            d = x ^ y
            pos = diff_bits.get(d)
            if pos is None:
                pos = diff_bits[d] = bits_of(d)
            wy = w[y]
            total = zero
            for i in pos:
                total += wx[i] * wy[i]
            if total < need:
                return PairViolation(x, y, total)
    return None


def weights_from_certificates(f: BooleanFunction) -> WeightScheme:
    """Indicator of each input's lexicographically first shortest certificate."""
    _, _, _, certs = certificate_complexity(f)
    one, zero = Fraction(1), Fraction(0)
    return WeightScheme(
        f.n, tuple(tuple(one if (A.mask >> i) & 1 else zero for i in range(f.n)) for A in certs)
    )


def weights_from_fc_sqrt(
    f: BooleanFunction, V: FCScheme, s: int | None = None
) -> WeightScheme:
    """Drop FC entries below ``1/(3s)``, boost the rest by 3/2 (capped at 1), take roots."""
    if s is None:
        s = sensitivity(f)[0]
    if s == 0:
        return WeightScheme.zeros(f.n).as_float()
    threshold = Fraction(1, 3 * s)
    out = []
    for v in V:
        row = []
        for vi in v:
            vi = Fraction(vi)
            boosted = min(Fraction(3, 2) * vi, Fraction(1)) if vi >= threshold else Fraction(0)
            row.append(math.sqrt(boosted))
        out.append(tuple(row))
    return WeightScheme(f.n, tuple(out), exact=False)


def sqrt_scheme_bound(s: int, fc: Fraction) -> float:
    return 1.5 * math.sqrt(3 * s) * float(fc)


def weights_or_composition(g: BooleanFunction, m: int, V: FCScheme) -> WeightScheme:
    """Scheme for ``OR(g, ..., g)``: 1-inputs weight their first satisfied block fully,
    0-inputs keep their FC vector."""
    k = g.n
    n = k * m
    if len(V) != 1 << n:
        raise ValueError("FC scheme must cover every input of the composition")
    low = (1 << k) - 1
    one, zero = Fraction(1), Fraction(0)
    out = []
    for x in range(1 << n):
        j = next((j for j in range(m) if g((x >> (j * k)) & low)), None)
        if j is None:
            out.append(tuple(Fraction(v) for v in V[x]))
        else:
            out.append(tuple(one if j * k <= i < (j + 1) * k else zero for i in range(n)))
    return WeightScheme(n, tuple(out))


def _ceil_rational(v: float, den: int = 10**6) -> Fraction:
    return min(Fraction(math.ceil(Fraction(v) * den), den), Fraction(1))


def _pareto_rows(rows: list[tuple[Fraction, ...]]) -> list[tuple[Fraction, ...]]:
    rows = sorted(set(rows))
    keep = []
    for r in rows:
        if not any(all(a <= b for a, b in zip(k, r)) for k in keep):
            keep = [k for k in keep if not all(a <= b for a, b in zip(r, k))]
            keep.append(r)
    return keep


def _best_response(
    f: BooleanFunction, x: int, fixed: Sequence[Sequence[Fraction]]
) -> tuple[Fraction, ...] | None:
    n = f.n
    fx = f(x)
    rows = []
    for y in range(f.size):
        if f(y) != fx:
            d = x ^ y
            rows.append(tuple(fixed[y][i] if (d >> i) & 1 else Fraction(0) for i in range(n)))
    p = LinearProgram([1] * n, sense="min")
    for r in _pareto_rows(rows):
        p.add({i: a for i, a in enumerate(r) if a}, ">=", 1)
    for i in range(n):
        p.add({i: 1}, "<=", 1)
    sol = solve_lp(p)
    if not sol.optimal:
        return None
    assert certify(p, sol)
    return tuple(sol.primal)


def ec_alternating_search(
    f: BooleanFunction, init: WeightScheme, rounds: int = 4
) -> WeightScheme:
    """Block-coordinate descent on the EC program.

    Each round re-optimises the 1-inputs against fixed 0-input weights, then
    the 0-inputs against the new 1-input weights; each per-input subproblem is
    an exact LP.  Returns the lowest-value feasible scheme seen (possibly
    ``init``).  Float schemes are converted by rounding the fixed side up to
    rationals, after which every later scheme is exact.
    """
    if f.n > 8:
        raise ValueError("ec_alternating_search supports n <= 8")
    if check_ec_feasible(f, init, 0 if init.exact else FLOAT_SLACK) is not None:
        raise InfeasibleScheme("initial scheme is not EC-feasible")
    best = init
    if rounds <= 0 or f.is_constant():
        return best
    if init.exact:
        cur = [tuple(Fraction(v) for v in w) for w in init.weights]
    else:
        cur = [tuple(_ceil_rational(v) for v in w) for w in init.weights]
    for _ in range(rounds):
        changed = False
        for side in (1, 0):
            new = list(cur)
            for x in f.inputs(side):
                w = _best_response(f, x, cur)
                if w is None:
                    return best
                new[x] = w
            changed |= new != cur
            cur = new
            cand = WeightScheme(f.n, tuple(cur))
            if float(cand.value) < float(best.value) or (
                cand.value == best.value and not best.exact
            ):
                best = cand
        if not changed:
            break
    return best


@dataclass
class ECBounds:
    lower: Fraction
    upper: object
    witness: WeightScheme
    lower_method: str = "fc-lp"
    upper_method: str = ""
    candidates: dict | None = None

    @property
    def exact(self) -> bool:
        return self.witness.exact


def ec_bounds(f: BooleanFunction, rounds: int = 4) -> ECBounds:
    """Certified interval ``[FC(f), upper]`` on EC(f)."""
    if f.n > 8:
        raise ValueError("ec_bounds supports n <= 8")
    fc, V = fractional_certificate(f)
    if f.is_constant():
        z = WeightScheme.zeros(f.n)
        return ECBounds(fc, Fraction(0), z, upper_method="zero", candidates={"zero": Fraction(0)})
    accepted: dict[str, WeightScheme] = {}

    def offer(name: str, W: WeightScheme) -> None:
        if check_ec_feasible(f, W, 0 if W.exact else FLOAT_SLACK) is None:
            accepted[name] = W

    cert = weights_from_certificates(f)
    offer("certificates", cert)
    if cert.value > fc:
        offer("certificates+alt", ec_alternating_search(f, cert, rounds))
        assert is_fc_feasible(f, V)
        sq = weights_from_fc_sqrt(f, V)
        offer("fc-sqrt", sq)
        if "fc-sqrt" in accepted:
            offer("fc-sqrt+alt", ec_alternating_search(f, sq, rounds))
    name, W = min(accepted.items(), key=lambda kv: (float(kv[1].value), not kv[1].exact))
    return ECBounds(
        fc, W.value, W, upper_method=name, candidates={k: v.value for k, v in accepted.items()}
    )


def dump_scheme(W: WeightScheme) -> str:
    """Text form: header line, then ``index: w_1 ... w_n`` per input."""
    lines = [f"n={W.n} mode={'exact' if W.exact else 'float'}"]
    for x, w in enumerate(W.weights):
        vals = " ".join(str(v) if W.exact else repr(float(v)) for v in w)
        lines.append(f"{x}: {vals}".rstrip())
    return "\n".join(lines) + "\n"


def load_scheme(text: str) -> WeightScheme:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty scheme")
    head = dict(kv.split("=", 1) for kv in lines[0].split())
    n = int(head["n"])
    exact = head.get("mode", "exact") == "exact"
    rows: dict[int, tuple] = {}
    for ln in lines[1:]:
        idx, _, rest = ln.partition(":")
        conv = Fraction if exact else float
        rows[int(idx)] = tuple(conv(t) for t in rest.split())
    if sorted(rows) != list(range(1 << n)):
        raise ValueError("scheme must list every input index exactly once")
    return WeightScheme(n, tuple(rows[x] for x in range(1 << n)), exact)


def scheme_value_bound_ok(f: BooleanFunction, W: WeightScheme, s: int, fc: Fraction) -> bool:
    return float(W.value) <= sqrt_scheme_bound(s, fc) + FLOAT_SLACK
