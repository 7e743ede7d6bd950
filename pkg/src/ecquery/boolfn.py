"""Truth-table Boolean functions, subcubes and sensitive blocks.

Inputs are integers ``0 <= x < 2**n``.  Position ``i`` (0-based) of ``x`` is
bit ``i`` of the integer, so ``table[k]`` is ``f`` evaluated at the input whose
first coordinate is the least significant bit of ``k``.  When an input is
written as a bit string the first coordinate comes first, e.g. ``"10"`` is the
input with ``x_1 = 1, x_2 = 0`` (integer 1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

MAX_ARITY = 16

Block = tuple[int, ...]


def popcount(v: int) -> int:
    return bin(v).count("1")


def bits_of(mask: int) -> tuple[int, ...]:
    """Positions set in ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def input_to_bits(x: int, n: int) -> str:
    return "".join(str((x >> i) & 1) for i in range(n))


def bits_to_input(s: str) -> int:
    if any(c not in "01" for c in s):
        raise ValueError(f"not a bit string: {s!r}")
    return sum(1 << i for i, c in enumerate(s) if c == "1")


@dataclass(frozen=True)
class BooleanFunction:
    n: int
    table: tuple[int, ...]

    def __post_init__(self):
        if not 0 <= self.n <= MAX_ARITY:
            raise ValueError(f"arity {self.n} outside [0, {MAX_ARITY}]")
        if len(self.table) != 1 << self.n:
            raise ValueError(f"table length {len(self.table)} != 2**{self.n}")
        if any(b not in (0, 1) for b in self.table):
            raise ValueError("table entries must be 0 or 1")

    def __call__(self, x: int) -> int:
        return self.table[x]

    def __repr__(self) -> str:
        return f"BooleanFunction(n={self.n}, table={self.to_string()!r})"

    @property
    def size(self) -> int:
        return 1 << self.n

    def to_string(self) -> str:
        return "".join(map(str, self.table))

    def inputs(self, b: int | None = None) -> list[int]:
        if b is None:
            return list(range(self.size))
        return [x for x, v in enumerate(self.table) if v == b]

    def is_constant(self) -> bool:
        return len(set(self.table)) == 1

    @cached_property
    def _subcube_values(self) -> dict[tuple[int, int], int | None]:
        # (mask, val) -> constant value of f on the subcube, or None
        n = self.n
        full = (1 << n) - 1
        out: dict[tuple[int, int], int | None] = {(full, x): self.table[x] for x in range(1 << n)}
        for mask in sorted(range(full), key=popcount, reverse=True):
            free = full & ~mask
            j = free & -free
            for val in _submasks(mask):
                a = out[(mask | j, val)]
                b = out[(mask | j, val | j)]
                out[(mask, val)] = a if a is not None and a == b else None
        return out

    def constant_on(self, mask: int, val: int) -> int | None:
        """Value of ``f`` if constant on the subcube fixing ``mask`` to ``val``, else None."""
        return self._subcube_values[(mask, val & mask)]


def _submasks(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


@dataclass(frozen=True, order=True)
class Subcube:
    """A partial assignment: positions in ``mask`` are fixed to the bits of ``val``."""

    n: int
    mask: int
    val: int

    def __post_init__(self):
        if self.val & ~self.mask:
            raise ValueError("val has bits outside mask")
        if self.mask >> self.n:
            raise ValueError("mask has positions outside [0, n)")

    @classmethod
    def from_assignment(cls, n: int, fixed: Mapping[int, int]) -> Subcube:
        mask = val = 0
        for i, b in fixed.items():
            if not 0 <= i < n or b not in (0, 1):
                raise ValueError(f"bad fixed position {i}={b}")
            mask |= 1 << i
            val |= b << i
        return cls(n, mask, val)

    @classmethod
    def full(cls, n: int) -> Subcube:
        return cls(n, 0, 0)

    @classmethod
    def from_pattern(cls, pattern: str) -> Subcube:
        """Parse ``"1*0"`` style patterns (first coordinate first)."""
        fixed = {}
        for i, c in enumerate(pattern):
            if c in "01":
                fixed[i] = int(c)
            elif c != "*":
                raise ValueError(f"bad pattern character {c!r}")
        return cls.from_assignment(len(pattern), fixed)

    @property
    def codim(self) -> int:
        return popcount(self.mask)

    @property
    def positions(self) -> tuple[int, ...]:
        return bits_of(self.mask)

    @property
    def values(self) -> tuple[int, ...]:
        return tuple((self.val >> i) & 1 for i in self.positions)

    def assignment(self) -> dict[int, int]:
        return dict(zip(self.positions, self.values))

    def sort_key(self) -> tuple:
        return (self.codim, self.positions, self.values)

    def __contains__(self, x: int) -> bool:
        return (x & self.mask) == self.val

    def members(self) -> list[int]:
        free = ((1 << self.n) - 1) & ~self.mask
        return sorted(self.val | s for s in _submasks(free))

    def pattern(self) -> str:
        return "".join(
            str((self.val >> i) & 1) if (self.mask >> i) & 1 else "*" for i in range(self.n)
        )

    def __str__(self) -> str:
        return self.pattern()


def subcubes_by_size(n: int, k: int) -> Iterable[Subcube]:
    """All co-dimension-``k`` subcubes in lexicographic (positions, values) order."""
    for pos in itertools.combinations(range(n), k):
        mask = sum(1 << i for i in pos)
        for vals in itertools.product((0, 1), repeat=k):
            yield Subcube(n, mask, sum(b << i for i, b in zip(pos, vals)))


def from_truth_table(bits: str, n: int | None = None) -> BooleanFunction:
    bits = bits.strip()
    if any(c not in "01" for c in bits):
        raise ValueError("truth table must contain only 0/1 characters")
    if n is None:
        n = len(bits).bit_length() - 1
    if len(bits) != 1 << n:
        raise ValueError(f"truth table length {len(bits)} does not match 2**{n}")
    return BooleanFunction(n, tuple(int(c) for c in bits))


def from_callable(n: int, fn) -> BooleanFunction:
    """Tabulate ``fn`` applied to the tuple of input bits (first coordinate first)."""
    return BooleanFunction(
        n, tuple(int(bool(fn(tuple((x >> i) & 1 for i in range(n))))) for x in range(1 << n))
    )


def family(name: str, *params: int) -> BooleanFunction:
    """Named families: AND(n), OR(n), XOR(n), MAJ(n odd), TRIBES(w, h).

    TRIBES(w, h) is the AND of ``h`` ORs, each over ``w`` consecutive bits.
    """
    key = name.upper()
    if key in ("AND", "OR", "XOR", "MAJ"):
        if len(params) != 1:
            raise ValueError(f"{key} takes one parameter (arity)")
        (n,) = params
        if key == "MAJ" and n % 2 == 0:
            raise ValueError("MAJ requires odd arity")
        ops = {
            "AND": all,
            "OR": any,
            "XOR": lambda xs: sum(xs) % 2,
            "MAJ": lambda xs: 2 * sum(xs) > len(xs),
        }
        return from_callable(n, ops[key])
    if key == "TRIBES":
        if len(params) != 2:
            raise ValueError("TRIBES takes (width, height)")
        w, h = params
        return from_callable(w * h, lambda xs: all(any(xs[j * w:(j + 1) * w]) for j in range(h)))
    raise ValueError(f"unsupported family {name!r}")


def constant(n: int, b: int) -> BooleanFunction:
    return BooleanFunction(n, (b,) * (1 << n))


def compose_or(g: BooleanFunction, m: int) -> BooleanFunction:
    """OR of ``m`` copies of ``g`` on consecutive disjoint blocks."""
    if m < 1:
        raise ValueError("need at least one copy")
    k = g.n
    if k * m > MAX_ARITY:
        raise ValueError(f"composed arity {k * m} exceeds {MAX_ARITY}")
    low = (1 << k) - 1
    table = tuple(
        int(any(g.table[(x >> (j * k)) & low] for j in range(m))) for x in range(1 << (k * m))
    )
    return BooleanFunction(k * m, table)


def restrict(f: BooleanFunction, A: Subcube) -> BooleanFunction:
    """Fix ``A``'s positions; the free positions keep their relative order."""
    free = [i for i in range(f.n) if not (A.mask >> i) & 1]
    table = []
    for z in range(1 << len(free)):
        x = A.val
        for t, i in enumerate(free):
            x |= ((z >> t) & 1) << i
        table.append(f.table[x])
    return BooleanFunction(len(free), tuple(table))


@lru_cache(maxsize=None)
def _block_order(n: int) -> tuple[int, ...]:
    return tuple(sorted(range(1, 1 << n), key=lambda m: (popcount(m), bits_of(m))))


def sensitive_block_masks(f: BooleanFunction, x: int) -> list[int]:
    """Inclusion-minimal sensitive blocks of ``x`` as bit masks, sorted by (size, positions)."""
    fx = f.table[x]
    found: list[int] = []
    for B in _block_order(f.n):
        if f.table[x ^ B] != fx and not any(M & B == M for M in found):
            found.append(B)
    return found


def minimal_sensitive_blocks(f: BooleanFunction, x: int) -> list[Block]:
    return [bits_of(B) for B in sensitive_block_masks(f, x)]


def flip(x: int, block: Iterable[int]) -> int:
    for i in block:
        x ^= 1 << i
    return x


def shift_subset(U: Iterable[int], A: Subcube, s: Sequence[int]) -> set[int]:
    """XOR every element of ``U`` with ``s`` on ``A``'s fixed positions.

    ``s`` lists one bit per fixed position, in ascending position order.
    """
    pos = A.positions
    if len(s) != len(pos):
        raise ValueError("shift vector must have one bit per fixed position")
    smask = sum(1 << i for i, b in zip(pos, s) if b)
    out = set()
    for u in U:
        if u not in A:
            raise ValueError(f"input {input_to_bits(u, A.n)} is outside {A}")
        out.add(u ^ smask)
    return out
