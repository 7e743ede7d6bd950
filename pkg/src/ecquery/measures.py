"""Combinatorial and LP-based complexity measures of total Boolean functions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .boolfn import (
    BooleanFunction,
    Subcube,
    bits_of,
    popcount,
    restrict,
    sensitive_block_masks,
)
from .exactlp import LinearProgram, certify, solve_lp

FCScheme = tuple[tuple[Fraction, ...], ...]


class DualityError(RuntimeError):
    """FC and fbs optima disagree; only possible through a solver bug."""


@dataclass(frozen=True)
class PairViolation:
    x: int
    y: int
    total: object


def _check_cap(f: BooleanFunction, cap: int, what: str) -> None:
    if f.n > cap:
        raise ValueError(f"{what} supports n <= {cap}, got n = {f.n}")


def certificate(f: BooleanFunction, x: int) -> Subcube:
    """Lexicographically first shortest ``f(x)``-certificate containing ``x``."""
    n = f.n
    for k in range(n + 1):
        for pos in itertools.combinations(range(n), k):
            mask = sum(1 << i for i in pos)
            if f.constant_on(mask, x & mask) is not None:
                return Subcube(n, mask, x & mask)
    raise AssertionError("the point subcube is always a certificate")


def certificate_complexity(f: BooleanFunction) -> tuple[int, int, int, list[Subcube]]:
    """Return ``(C, C0, C1, witnesses)``; ``C^b`` is 0 when ``f^-1(b)`` is empty."""
    certs = [certificate(f, x) for x in range(f.size)]
    per_side = {0: 0, 1: 0}
    for x, A in enumerate(certs):
        per_side[f(x)] = max(per_side[f(x)], A.codim)
    return max(per_side.values()), per_side[0], per_side[1], certs


def sensitivity_at(f: BooleanFunction, x: int) -> int:
    return sum(1 for i in range(f.n) if f(x ^ (1 << i)) != f(x))


def sensitivity(f: BooleanFunction) -> tuple[int, list[int]]:
    per = [sensitivity_at(f, x) for x in range(f.size)]
    return max(per, default=0), per


def _max_packing(blocks: Sequence[int], n: int) -> list[int]:
    best: list[int] = []

    def dfs(start: int, used: int, chosen: list[int]) -> None:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        remaining = len(blocks) - start
        if len(chosen) + min(remaining, n - popcount(used)) <= len(best):
            return
        for k in range(start, len(blocks)):
            B = blocks[k]
            if not B & used:
                chosen.append(B)
                dfs(k + 1, used | B, chosen)
                chosen.pop()
                if len(chosen) + min(len(blocks) - k - 1, n - popcount(used)) <= len(best):
                    return

    dfs(0, 0, [])
    return best


def block_sensitivity_at(f: BooleanFunction, x: int) -> tuple[int, list[tuple[int, ...]]]:
    packing = _max_packing(sensitive_block_masks(f, x), f.n)
    return len(packing), [bits_of(B) for B in packing]


def block_sensitivity(f: BooleanFunction) -> tuple[int, list[int], list[list[tuple[int, ...]]]]:
    """Return ``(bs, per-input bs, per-input witness packing)``."""
    _check_cap(f, 12, "block_sensitivity")
    per, packs = [], []
    for x in range(f.size):
        k, p = block_sensitivity_at(f, x)
        per.append(k)
        packs.append(p)
    return max(per, default=0), per, packs


def decision_tree_depth(f: BooleanFunction) -> tuple[int, int | None]:
    """Return ``(D(f), best first query)``; the query is None for constant ``f``."""
    _check_cap(f, 12, "decision_tree_depth")

    @lru_cache(maxsize=None)
    def depth(table: tuple[int, ...]) -> tuple[int, int | None]:
        if len(set(table)) == 1:
            return 0, None
        g = BooleanFunction(len(table).bit_length() - 1, table)
        best = None
        for i in range(g.n):
            d = 1 + max(
                depth(restrict(g, Subcube(g.n, 1 << i, b << i)).table)[0] for b in (0, 1)
            )
            if best is None or d < best[0]:
                best = (d, i)
        return best

    return depth(f.table)


def fc_program(f: BooleanFunction, x: int) -> LinearProgram:
    rows = [({i: 1 for i in bits_of(B)}, ">=", 1) for B in sensitive_block_masks(f, x)]
    return LinearProgram([1] * f.n, rows, sense="min")


def fbs_program(f: BooleanFunction, x: int) -> tuple[LinearProgram, list[int]]:
    blocks = sensitive_block_masks(f, x)
    rows = []
    for i in range(f.n):
        cols = {k: 1 for k, B in enumerate(blocks) if (B >> i) & 1}
        if cols:
            rows.append((cols, "<=", 1))
    return LinearProgram([1] * len(blocks), rows, sense="max"), blocks


def fractional_certificate_at(f: BooleanFunction, x: int) -> tuple[Fraction, tuple[Fraction, ...]]:
    p = fc_program(f, x)
    sol = solve_lp(p)
    assert certify(p, sol), "FC solution failed its optimality certificate"
    return sol.value, tuple(sol.primal)


def fractional_certificate(f: BooleanFunction) -> tuple[Fraction, FCScheme]:
    """FC(f) and an optimal per-input weight scheme ``v_x``."""
    _check_cap(f, 10, "fractional_certificate")
    vals, scheme = [], []
    for x in range(f.size):
        v, vec = fractional_certificate_at(f, x)
        vals.append(v)
        scheme.append(vec)
    return max(vals, default=Fraction(0)), tuple(scheme)


def fc_values(f: BooleanFunction, scheme: FCScheme) -> list[Fraction]:
    return [sum(v, Fraction(0)) for v in scheme]


def fractional_block_sensitivity_at(
    f: BooleanFunction, x: int
) -> tuple[Fraction, dict[tuple[int, ...], Fraction]]:
    p, blocks = fbs_program(f, x)
    sol = solve_lp(p)
    assert certify(p, sol), "fbs solution failed its optimality certificate"
    weights = {bits_of(B): u for B, u in zip(blocks, sol.primal) if u}
    return sol.value, weights


def fractional_block_sensitivity(
    f: BooleanFunction,
) -> tuple[Fraction, list[dict[tuple[int, ...], Fraction]]]:
    """fbs(f) with optimal block weights per input; cross-checked against FC exactly."""
    _check_cap(f, 10, "fractional_block_sensitivity")
    vals, weights = [], []
    for x in range(f.size):
        v, u = fractional_block_sensitivity_at(f, x)
        fc, _ = fractional_certificate_at(f, x)
        if v != fc:
            raise DualityError(f"fbs(f,x)={v} but FC(f,x)={fc} at x={x}")
        vals.append(v)
        weights.append(u)
    return max(vals, default=Fraction(0)), weights


def is_fc_feasible(f: BooleanFunction, scheme: FCScheme) -> bool:
    for x in range(f.size):
        v = scheme[x]
        if any(w < 0 for w in v):
            return False
        for B in sensitive_block_masks(f, x):
            if sum((v[i] for i in bits_of(B)), Fraction(0)) < 1:
                return False
    return True


def kulkarni_tal_check(f: BooleanFunction, scheme: FCScheme) -> PairViolation | None:
    """First opposite pair (index order) whose summed pointwise minima fall below 1."""
    if len(scheme) != f.size or not is_fc_feasible(f, scheme):
        raise ValueError("scheme is not feasible for the FC program")
    for x in range(f.size):
        for y in range(x + 1, f.size):
            if f(x) == f(y):
                continue
            total = sum((min(scheme[x][i], scheme[y][i]) for i in bits_of(x ^ y)), Fraction(0))
            if total < 1:
                return PairViolation(x, y, total)
    return None


@dataclass
class MeasureReport:
    n: int
    table: str
    C: int
    C0: int
    C1: int
    s: int
    bs: int
    FC: Fraction
    fbs: Fraction
    D: int
    per_input: list[dict] = field(default_factory=list)
    certificates: list[Subcube] = field(default_factory=list)
    packings: list[list[tuple[int, ...]]] = field(default_factory=list)
    fc_scheme: FCScheme = ()
    first_query: int | None = None


def measure_report(f: BooleanFunction) -> MeasureReport:
    C, C0, C1, certs = certificate_complexity(f)
    s, s_per = sensitivity(f)
    bs, bs_per, packs = block_sensitivity(f)
    FC, scheme = fractional_certificate(f)
    fbs, _ = fractional_block_sensitivity(f)
    D, q = decision_tree_depth(f)
    fc_per = fc_values(f, scheme)
    per = [
        {"x": x, "f": f(x), "C": certs[x].codim, "s": s_per[x], "bs": bs_per[x], "FC": fc_per[x]}
        for x in range(f.size)
    ]
    return MeasureReport(
        f.n, f.to_string(), C, C0, C1, s, bs, FC, fbs, D, per, certs, packs, scheme, q
    )
