"""Input distributions, corruption bounds and the partition-bound LP."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .boolfn import BooleanFunction, Subcube, _submasks, flip, popcount, subcubes_by_size
from .exactlp import LinearProgram, certify, solve_lp
from .measures import fractional_block_sensitivity_at

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class ProductDistribution:
    """Independent bits with ``Pr[x_i = 1] = marginals[i]``."""

    marginals: tuple[Fraction, ...]

    def __post_init__(self):
        m = tuple(Fraction(p) for p in self.marginals)
        if any(not 0 <= p <= 1 for p in m):
            raise ValueError("marginals must lie in [0, 1]")
        object.__setattr__(self, "marginals", m)

    @property
    def n(self) -> int:
        return len(self.marginals)

    def mass(self, x: int) -> Fraction:
        out = _ONE
        for i, p in enumerate(self.marginals):
            out *= p if (x >> i) & 1 else 1 - p
        return out

    def masses(self) -> tuple[Fraction, ...]:
        out = [_ONE]
        for p in self.marginals:
            q = 1 - p
            out = [m * q for m in out] + [m * p for m in out]
        return tuple(out)


@dataclass(frozen=True)
class GeneralDistribution:
    mass_table: tuple[Fraction, ...]

    def __post_init__(self):
        m = tuple(Fraction(p) for p in self.mass_table)
        size = len(m)
        if size == 0 or size & (size - 1):
            raise ValueError("mass table length must be a power of two")
        if any(p < 0 for p in m):
            raise ValueError("masses must be nonnegative")
        if sum(m) != 1:
            raise ValueError(f"masses sum to {sum(m)}, not 1")
        object.__setattr__(self, "mass_table", m)

    @property
    def n(self) -> int:
        return len(self.mass_table).bit_length() - 1

    def mass(self, x: int) -> Fraction:
        return self.mass_table[x]

    def masses(self) -> tuple[Fraction, ...]:
        return self.mass_table


Distribution = Union[ProductDistribution, GeneralDistribution]


def uniform(n: int) -> ProductDistribution:
    return ProductDistribution((Fraction(1, 2),) * n)


def random_product(n: int, rng: random.Random, denominator: int = 16) -> ProductDistribution:
    """Marginals drawn uniformly from ``{1/d, ..., (d-1)/d}``."""
    return ProductDistribution(
        tuple(Fraction(rng.randint(1, denominator - 1), denominator) for _ in range(n))
    )


def _fixes_items(fixes) -> dict[int, int]:
    if isinstance(fixes, Subcube):
        return fixes.assignment()
    return dict(fixes)


def condition_product(mu: ProductDistribution, fixes: Union[Mapping[int, int], Subcube]) -> ProductDistribution:
    """Condition on fixed coordinates; their marginals become point masses."""
    m = list(mu.marginals)
    for i, b in _fixes_items(fixes).items():
        p = m[i] if b else 1 - m[i]
        if p == 0:
            raise ValueError(f"conditioning on zero-probability event x_{i + 1}={b}")
        m[i] = Fraction(b)
    return ProductDistribution(tuple(m))


def condition_general(mu: Distribution, fixes: Union[Mapping[int, int], Subcube]) -> GeneralDistribution:
    A = fixes if isinstance(fixes, Subcube) else Subcube.from_assignment(mu.n, fixes)
    masses = mu.masses()
    total = sum((masses[x] for x in A.members()), _ZERO)
    if total == 0:
        raise ValueError("conditioning on a zero-probability subcube")
    return GeneralDistribution(tuple(m / total if x in A else _ZERO for x, m in enumerate(masses)))


def subcube_masses(f: BooleanFunction, mu: Distribution) -> dict[tuple[int, int], tuple[Fraction, Fraction]]:
    """``(mask, val) -> (mu(A), mu(A and f = 1))`` for every subcube."""
    if f.n > 10:
        raise ValueError("subcube scans support n <= 10")
    if mu.n != f.n:
        raise ValueError("distribution arity does not match function")
    n = f.n
    full = (1 << n) - 1
    masses = mu.masses()
    out = {(full, x): (masses[x], masses[x] if f(x) else _ZERO) for x in range(1 << n)}
    for mask in sorted(range(full), key=popcount, reverse=True):
        free = full & ~mask
        j = free & -free
        for val in _submasks(mask):
            a0, a1 = out[(mask | j, val)]
            b0, b1 = out[(mask | j, val | j)]
            out[(mask, val)] = (a0 + b0, a1 + b1)
    return out


def _qualifies(stats, b: int, eps: Fraction) -> bool:
    total, ones = stats
    if total == 0:
        return False
    wrong = total - ones if b == 1 else ones
    return wrong <= eps * total


@dataclass(frozen=True)
class CorruptionResult:
    size: int
    witness: Subcube
    b: int


def _check_eps(eps) -> Fraction:
    eps = Fraction(eps)
    if not 0 <= eps < 1:
        raise ValueError("error parameter must lie in [0, 1)")
    return eps


def corruption_bound(
    f: BooleanFunction, b: int, mu: Distribution, eps, table=None
) -> CorruptionResult | None:
    """Shortest positive-mass subcube whose conditional error for ``b`` is at most ``eps``."""
    eps = _check_eps(eps)
    table = table if table is not None else subcube_masses(f, mu)
    for k in range(f.n + 1):
        for A in subcubes_by_size(f.n, k):
            if _qualifies(table[(A.mask, A.val)], b, eps):
                return CorruptionResult(k, A, b)
    return None


def shortest_certificate(
    f: BooleanFunction, mu: Distribution, eps, table=None
) -> CorruptionResult | None:
    """Shortest eps-error certificate for either output (lexicographic ties, then b)."""
    eps = _check_eps(eps)
    table = table if table is not None else subcube_masses(f, mu)
    for k in range(f.n + 1):
        for A in subcubes_by_size(f.n, k):
            st = table[(A.mask, A.val)]
            for b in (0, 1):
                if _qualifies(st, b, eps):
                    return CorruptionResult(k, A, b)
    return None


def corr_min_product(f: BooleanFunction, mu: Distribution, eps) -> tuple[int, int] | None:
    """``min_b corr^{b,mu}_eps(f)`` as ``(b*, size)``; ties go to ``b = 0``."""
    table = subcube_masses(f, mu)
    found = [r for r in (corruption_bound(f, b, mu, eps, table) for b in (0, 1)) if r]
    if not found:
        return None
    r = min(found, key=lambda r: (r.size, r.b))
    return r.b, r.size


def adversarial_distribution(
    f: BooleanFunction, x_star: int, c, eps=None
) -> GeneralDistribution:
    """Mass ``c`` on ``x*`` and ``(1-c) u_B / fbs(f, x*)`` on each flipped ``x*^B``."""
    c = Fraction(c)
    upper = 1 - Fraction(eps) if eps is not None else _ONE
    if not 0 < c < upper:
        raise ValueError(f"c must lie in (0, {upper})")
    if f.is_constant():
        raise ValueError("constant functions have no sensitive blocks")
    fbs_x, u = fractional_block_sensitivity_at(f, x_star)
    if fbs_x <= 0:
        raise ValueError("fbs(f, x*) must be positive")
    masses = [_ZERO] * f.size
    masses[x_star] = c
    for block, ub in u.items():
        masses[flip(x_star, block)] += (1 - c) * ub / fbs_x
    return GeneralDistribution(tuple(masses))


def fbs_corr_bound(fbs: Fraction, eps, c) -> Fraction:
    eps, c = Fraction(eps), Fraction(c)
    return fbs * (1 - eps - c) / (1 - eps - c + eps * c)


@dataclass
class PartitionLPResult:
    value: Fraction
    weights: dict[tuple[int, Subcube], Fraction]
    eps: Fraction

    @property
    def prt(self) -> float:
        return math.log2(self.value)


def partition_program(f: BooleanFunction, eps) -> tuple[LinearProgram, list[tuple[int, Subcube]]]:
    eps = Fraction(eps)
    n = f.n
    cubes = [A for k in range(n + 1) for A in subcubes_by_size(n, k)]
    cols = [(z, A) for z in (0, 1) for A in cubes]
    cover: dict[int, list[int]] = {x: [] for x in range(f.size)}
    for k, (z, A) in enumerate(cols):
        for x in A.members():
            cover[x].append(k)
    p = LinearProgram([1 << A.codim for _, A in cols], sense="min")
    for x in range(f.size):
        p.add({k: 1 for k in cover[x] if cols[k][0] == f(x)}, ">=", 1 - eps)
        p.add({k: 1 for k in cover[x]}, "=", 1)
    return p, cols


def partition_bound(f: BooleanFunction, eps) -> PartitionLPResult:
    """Exact optimum of the partition LP; ``prt`` is its base-2 logarithm."""
    if f.n > 5:
        raise ValueError("partition_bound supports n <= 5")
    p, cols = partition_program(f, eps)
    sol = solve_lp(p)
    if not sol.optimal or not certify(p, sol):
        raise RuntimeError(f"partition LP not solved to certified optimality: {sol.status}")
    weights = {cols[k]: w for k, w in enumerate(sol.primal) if w}
    return PartitionLPResult(sol.value, weights, Fraction(eps))


def fbs_prt_holds(value: Fraction, bs: int, eps) -> bool:
    """``log2(value) >= eps*bs + log2(eps) - 2`` compared exactly.

    With ``eps = p/q`` this is ``(4*value/eps)**q >= 2**(bs*p)``.
    """
    eps = Fraction(eps)
    p, q = eps.numerator, eps.denominator
    return (4 * value / eps) ** q >= Fraction(2) ** (bs * p)


def ceps_prt_holds(corr: int, value: Fraction, eps, tol: float = 1e-12) -> bool:
    """``corr <= log2(value) * log2(1/eps)``; exact when ``1/eps`` is a power of two."""
    eps = Fraction(eps)
    inv = 1 / eps
    if inv.denominator == 1 and inv.numerator & (inv.numerator - 1) == 0:
        j = inv.numerator.bit_length() - 1
        return Fraction(2) ** corr <= value**j
    return corr <= math.log2(value) * math.log2(float(inv)) + tol


def parse_distribution(text: str, n: int | None = None) -> Distribution:
    """``product: p1 ... pn`` or ``general: m_0 ... m_{2^n-1}`` with fractions."""
    kind, sep, rest = text.strip().partition(":")
    if not sep:
        raise ValueError("distribution must start with 'product:' or 'general:'")
    values = [Fraction(t) for t in rest.split()]
    kind = kind.strip().lower()
    if kind == "product":
        mu: Distribution = ProductDistribution(tuple(values))
    elif kind == "general":
        mu = GeneralDistribution(tuple(values))
    else:
        raise ValueError(f"unknown distribution kind {kind!r}")
    if n is not None and mu.n != n:
        raise ValueError(f"distribution has arity {mu.n}, expected {n}")
    return mu


def format_distribution(mu: Distribution) -> str:
    if isinstance(mu, ProductDistribution):
        return "product: " + " ".join(map(str, mu.marginals)) + "\n"
    return "general: " + " ".join(map(str, mu.mass_table)) + "\n"
