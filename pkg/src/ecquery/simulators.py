"""Executable query algorithms: the EC-weight sampler and the corruption-certificate walk.

Randomness comes from ``random.Random`` (Mersenne Twister).  Each trial gets its
own generator seeded from ``(seed, input, trial)`` so results do not depend on
the order or parallelism in which trials run.
"""

from __future__ import annotations

import bisect
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .boolfn import BooleanFunction, input_to_bits
from .distmeasures import (
    ProductDistribution,
    condition_product,
    shortest_certificate,
    subcube_masses,
)
from .ec import FLOAT_SLACK, InfeasibleScheme, WeightScheme, check_ec_feasible
from .measures import block_sensitivity


class NoCertificateError(RuntimeError):
    """No positive-mass eps-error certificate exists; unreachable for eps >= 0."""


class IterationCapExceeded(RuntimeError):
    pass


def trial_rng(seed: int, x: int, trial: int) -> random.Random:
    return random.Random((seed << 64) | (x << 32) | trial)


@dataclass
class QueryTrace:
    n: int
    queries: list[tuple[int, int]] = field(default_factory=list)
    iterations: list[dict] = field(default_factory=list)
    output: int | None = None
    exit: str = ""
    rounds: int = 0

    @property
    def num_queries(self) -> int:
        return len(self.queries)

    def dump(self) -> str:
        """One tab-separated line per iteration:
        iter, chosen (y or A), queried positions, answers, t0, t1, exit."""
        lines = []
        last = len(self.iterations) - 1
        for k, it in enumerate(self.iterations):
            chosen = it.get("y_bits") or it.get("A", "-")
            qs = ",".join(str(i + 1) for i in it["queried"]) or "-"
            ans = "".join(str(a) for a in it["answers"]) or "-"
            t0 = it.get("t0", "-")
            t1 = it.get("t1", "-")
            ex = self.exit if k == last else "-"
            lines.append(f"{k + 1}\t{chosen}\t{qs}\t{ans}\t{t0}\t{t1}\t{ex}")
        if not self.iterations:
            lines.append(f"0\t-\t-\t-\t-\t-\t{self.exit}")
        return "\n".join(lines) + "\n"


def ec_budget(value, eps) -> int:
    """``ceil(value**2 / eps)`` computed exactly."""
    return math.ceil(Fraction(value) ** 2 / Fraction(eps))


class _Sampler:
    """Precomputed per-input cumulative weights for fast position sampling."""

    def __init__(self, W: WeightScheme):
        self.cum = []
        for w in W.weights:
            acc, row = 0.0, []
            for v in w:
                acc += float(v)
                row.append(acc)
            self.cum.append(row)

    def sample(self, y: int, rng: random.Random) -> int:
        row = self.cum[y]
        total = row[-1] if row else 0.0
        if total <= 0:
            raise ValueError(f"input {y} has zero total weight")
        i = bisect.bisect_right(row, rng.random() * total)
        return min(i, len(row) - 1)


def _check_scheme(f: BooleanFunction, W: WeightScheme) -> None:
    if check_ec_feasible(f, W, 0 if W.exact else FLOAT_SLACK) is not None:
        raise InfeasibleScheme("weight scheme is not EC-feasible")


def _run_ec(f, sampler, b, budget, x, rng, record, cap=None):
    n = f.n
    trace = QueryTrace(n)
    const = f.constant_on(0, 0)
    if const is not None:
        trace.output, trace.exit = const, "constant"
        return const, trace
    opposite = f.inputs(1 - b)
    ptr = 0
    mask = val = 0
    k = 0
    limit = budget if cap is None else cap
    while k < limit:
        k += 1
        while ptr < len(opposite) and (opposite[ptr] & mask) != val:
            ptr += 1
        if ptr == len(opposite):
            out, ex = b, "no-consistent"
            if record:
                trace.iterations.append({"y_bits": "-", "queried": [], "answers": []})
            break
        y = opposite[ptr]
        i = sampler.sample(y, rng)
        new = not (mask >> i) & 1
        if new:
            a = (x >> i) & 1
            mask |= 1 << i
            val |= a << i
            trace.queries.append((i, a))
        if record:
            trace.iterations.append(
                {
                    "y": y,
                    "y_bits": input_to_bits(y, n),
                    "i": i,
                    "queried": [i] if new else [],
                    "answers": [(x >> i) & 1] if new else [],
                }
            )
        c = f.constant_on(mask, val)
        if c is not None:
            out, ex = c, "certificate"
            break
    else:
        if cap is not None:
            raise IterationCapExceeded(f"no certificate after {cap} iterations")
        out, ex = 1 - b, "budget"
    trace.output, trace.exit, trace.rounds = out, ex, k
    return out, trace


def run_ec_algorithm(
    f: BooleanFunction,
    W: WeightScheme,
    b: int,
    eps,
    x: int,
    rng: random.Random,
    record: bool = True,
) -> tuple[int, QueryTrace]:
    """One-sided algorithm certifying side ``b``.

    Repeatedly picks the first consistent input ``y`` with ``f(y) = 1 - b``,
    samples a position from ``w_y`` and queries it, stopping at a certificate.
    Returns ``b`` if no such ``y`` remains and ``1 - b`` once the budget of
    ``ceil(value(W)^2 / eps)`` iterations is spent.  Inputs with
    ``f(x) = 1 - b`` are therefore never misclassified.
    """
    _check_scheme(f, W)
    if f.is_constant():
        return _run_ec(f, None, b, 0, x, rng, record)
    budget = ec_budget(W.value, eps)
    return _run_ec(f, _Sampler(W), b, budget, x, rng, record)


def run_las_vegas(
    f: BooleanFunction,
    W: WeightScheme,
    eps,
    x: int,
    rng: random.Random,
    iteration_cap: int = 10**6,
    record: bool = True,
) -> tuple[int, QueryTrace]:
    """Zero-error variant: iterate without a budget until a certificate appears."""
    _check_scheme(f, W)
    if f.is_constant():
        return _run_ec(f, None, 0, 0, x, rng, record)
    return _run_ec(f, _Sampler(W), 0, 0, x, rng, record, cap=iteration_cap)


def half_width(p_hat: float, trials: int) -> float:
    p = min(max(p_hat, 1 / trials), 1 - 1 / trials) if trials > 1 else 0.5
    return 3 * math.sqrt(p * (1 - p) / trials)


@dataclass
class SimStats:
    trials: int
    seed: int
    b: int | None
    per_input: dict[int, dict] = field(default_factory=dict)
    error_rate: float = 0.0
    error_half_width: float = 0.0
    mean_queries: float = 0.0
    max_queries: int = 0
    max_iterations: int = 0
    budget: int | None = None


def _aggregate(stats: SimStats, counts: dict[int, tuple[int, list[int], int]], err_inputs) -> SimStats:
    total_q = runs = errs = err_runs = 0
    for x, (e, qs, iters) in counts.items():
        t = len(qs)
        p_hat = e / t
        stats.per_input[x] = {
            "errors": e,
            "trials": t,
            "error_rate": p_hat,
            "half_width": half_width(p_hat, t),
            "mean_queries": sum(qs) / t,
            "max_queries": max(qs),
        }
        total_q += sum(qs)
        runs += t
        stats.max_queries = max(stats.max_queries, max(qs))
        stats.max_iterations = max(stats.max_iterations, iters)
        if x in err_inputs:
            errs += e
            err_runs += t
    stats.mean_queries = total_q / runs if runs else 0.0
    if err_runs:
        stats.error_rate = errs / err_runs
        stats.error_half_width = half_width(stats.error_rate, err_runs)
    return stats


def estimate_one_sided_error(
    f: BooleanFunction,
    W: WeightScheme,
    b: int,
    eps,
    trials: int,
    seed: int = 0,
    inputs=None,
) -> SimStats:
    """Run the one-sided algorithm ``trials`` times on each input."""
    if trials < 1:
        raise ValueError("trials must be positive")
    _check_scheme(f, W)
    inputs = list(range(f.size)) if inputs is None else list(inputs)
    const = f.is_constant()
    budget = 0 if const else ec_budget(W.value, eps)
    sampler = None if const else _Sampler(W)
    counts = {}
    for x in inputs:
        e, qs, iters = 0, [], 0
        for t in range(trials):
            out, tr = _run_ec(f, sampler, b, budget, x, trial_rng(seed, x, t), record=False)
            e += out != f(x)
            qs.append(tr.num_queries)
            iters = max(iters, tr.rounds)
        counts[x] = (e, qs, iters)
    stats = SimStats(trials, seed, b, budget=budget)
    return _aggregate(stats, counts, {x for x in inputs if f(x) == b})


def estimate_las_vegas(
    f: BooleanFunction, W: WeightScheme, trials: int, seed: int = 0, inputs=None
) -> SimStats:
    _check_scheme(f, W)
    inputs = list(range(f.size)) if inputs is None else list(inputs)
    sampler = None if f.is_constant() else _Sampler(W)
    counts = {}
    for x in inputs:
        e, qs, iters = 0, [], 0
        for t in range(trials):
            out, tr = _run_ec(f, sampler, 0, 0, x, trial_rng(seed, x, t), False, cap=10**6)
            e += out != f(x)
            qs.append(tr.num_queries)
            iters = max(iters, tr.rounds)
        counts[x] = (e, qs, iters)
    return _aggregate(SimStats(trials, seed, None), counts, set(inputs))


@lru_cache(maxsize=4096)
def _cached_certificate(f: BooleanFunction, mu: ProductDistribution, eps: Fraction):
    return shortest_certificate(f, mu, eps, subcube_masses(f, mu))


def run_corruption_algorithm(
    f: BooleanFunction,
    mu: ProductDistribution,
    eps,
    x: int,
    bs: int | None = None,
) -> tuple[int, QueryTrace]:
    """Deterministic walk over shortest eps-error certificates of the conditioned
    distribution, voting with counters ``t_0, t_1`` capped at ``2 bs(f)``."""
    eps = Fraction(eps)
    if not 0 <= eps < Fraction(1, 2):
        raise ValueError("eps must lie in [0, 1/2)")
    if f.n > 10:
        raise ValueError("run_corruption_algorithm supports n <= 10")
    if mu.mass(x) == 0:
        raise ValueError("input has zero probability under mu")
    if bs is None:
        bs = block_sensitivity(f)[0]
    trace = QueryTrace(f.n)
    eta = mu
    known: dict[int, int] = {}
    t = [0, 0]
    while True:
        res = _cached_certificate(f, eta, eps)
        if res is None:
            raise NoCertificateError("no positive-mass eps-error certificate")
        A, b = res.witness, res.b
        fresh = [i for i in A.positions if i not in known]
        answers = [(x >> i) & 1 for i in fresh]
        for i, a in zip(fresh, answers):
            known[i] = a
            trace.queries.append((i, a))
        t[b] += 1
        S = tuple(i for i in A.positions if ((x >> i) & 1) != ((A.val >> i) & 1))
        trace.iterations.append(
            {
                "A": A.pattern(),
                "subcube": A,
                "b": b,
                "queried": fresh,
                "answers": answers,
                "S": S,
                "t0": t[0],
                "t1": t[1],
            }
        )
        trace.rounds += 1
        if x in A:
            trace.output, trace.exit = b, "consistent"
            return b, trace
        if t[b] == 2 * bs:
            trace.output, trace.exit = b, "counter"
            return b, trace
        eta = condition_product(eta, {i: (x >> i) & 1 for i in A.positions})


@dataclass
class DistributionalErrorResult:
    error: Fraction
    max_queries: int
    max_iterations: int
    iteration_histogram: dict[int, int]
    traces: dict[int, QueryTrace]


def exact_distributional_error(
    f: BooleanFunction, mu: ProductDistribution, eps
) -> DistributionalErrorResult:
    """Exact mu-mass of inputs on which the corruption walk answers wrongly."""
    if f.n > 8:
        raise ValueError("exact_distributional_error supports n <= 8")
    bs = block_sensitivity(f)[0]
    masses = mu.masses()
    err = Fraction(0)
    hist: dict[int, int] = {}
    traces = {}
    max_q = max_it = 0
    for x in range(f.size):
        if masses[x] == 0:
            continue
        out, tr = run_corruption_algorithm(f, mu, eps, x, bs)
        traces[x] = tr
        if out != f(x):
            err += masses[x]
        k = len(tr.iterations)
        hist[k] = hist.get(k, 0) + 1
        max_q = max(max_q, tr.num_queries)
        max_it = max(max_it, k)
    return DistributionalErrorResult(err, max_q, max_it, dict(sorted(hist.items())), traces)


def blocks_pairwise_disjoint(trace: QueryTrace) -> bool:
    seen = 0
    for it in trace.iterations:
        m = sum(1 << i for i in it["S"])
        if m & seen:
            return False
        seen |= m
    return True
