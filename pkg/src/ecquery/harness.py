"""Corpus generation and the inequality-verification suite."""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .boolfn import BooleanFunction, compose_or, family
from .distmeasures import (
    adversarial_distribution,
    ceps_prt_holds,
    corr_min_product,
    corruption_bound,
    fbs_corr_bound,
    fbs_prt_holds,
    partition_bound,
    random_product,
    uniform,
)
from .ec import (
    FLOAT_SLACK,
    check_ec_feasible,
    ec_bounds,
    sqrt_scheme_bound,
    weights_from_certificates,
    weights_from_fc_sqrt,
    weights_or_composition,
)
from .measures import (
    block_sensitivity,
    certificate_complexity,
    decision_tree_depth,
    fractional_block_sensitivity,
    fractional_block_sensitivity_at,
    fractional_certificate,
    kulkarni_tal_check,
    sensitivity,
)
from .simulators import (
    blocks_pairwise_disjoint,
    estimate_las_vegas,
    estimate_one_sided_error,
    exact_distributional_error,
)

# Seeds for the random parts of the default corpus; changing them changes CI.
RANDOM_CORPUS_SEED = 20170606
RANDOM_CORPUS_COUNT = 6
RANDOM_CORPUS_ARITIES = (4, 5, 6)


@dataclass(frozen=True)
class CheckSpec:
    anchor: str
    statement: str


CHECKS: dict[str, CheckSpec] = {
    "measure-chain": CheckSpec(
        "definitions:measure-chain", "s <= bs <= fbs = FC <= C <= D <= C0*C1"
    ),
    "fc-fbs-duality": CheckSpec("definitions:fc-fbs-duality", "FC(f) = fbs(f) exactly"),
    "fc-le-ec": CheckSpec("lemma:fc-le-ec", "every feasible EC scheme has value >= FC"),
    "ec-le-c": CheckSpec("lemma:ec-le-c", "certificate scheme feasible with value exactly C"),
    "ec-sandwich": CheckSpec("theorem:ec-sandwich", "FC <= EC_upper <= C and C <= EC_upper^2"),
    "kulkarni-tal": CheckSpec(
        "lemma:kulkarni-tal", "optimal FC schemes: sum of pointwise minima >= 1 on opposite pairs"
    ),
    "ec-sqrt-bound": CheckSpec(
        "lemma:ec-fc-sqrt-s", "sqrt scheme feasible and value <= 1.5*sqrt(3s)*FC"
    ),
    "or-composition": CheckSpec(
        "construction:or-composition", "OR-composition scheme feasible with value <= C"
    ),
    "ec-one-sided": CheckSpec(
        "claim:one-sided", "one-sided algorithm never errs on the certified side; error <= eps"
    ),
    "ec-las-vegas": CheckSpec("theorem:ec-quadratic", "zero-error variant always correct"),
    "alg2-error": CheckSpec(
        "theorem:product-distributional-upper",
        "corruption walk: error <= 4 eps, iterations <= 4bs-1, disjoint S blocks",
    ),
    "d-corr": CheckSpec(
        "theorem:distributional-vs-corruption",
        "corruption-walk queries <= 4 L^2 for a certified lower bound L on corr_eps",
    ),
    "fbs-prt": CheckSpec("theorem:fbs-prt", "prt_{eps/4} >= eps*bs + log2(eps) - 2"),
    "ceps-prt": CheckSpec("lemma:corr-prt", "min_b corr_{2eps} <= prt_eps * log2(1/eps)"),
    "fbs-corr": CheckSpec(
        "lemma:fbs-corr", "adversarial mu_c: corr_eps >= fbs(1-eps-c)/(1-eps-c+eps c)"
    ),
}

# Every in-scope theorem/lemma must be covered by at least one check.
REQUIRED_ANCHORS = (
    "definitions:measure-chain",
    "definitions:fc-fbs-duality",
    "lemma:fc-le-ec",
    "lemma:ec-le-c",
    "theorem:ec-sandwich",
    "lemma:kulkarni-tal",
    "lemma:ec-fc-sqrt-s",
    "construction:or-composition",
    "claim:one-sided",
    "theorem:ec-quadratic",
    "theorem:product-distributional-upper",
    "theorem:distributional-vs-corruption",
    "theorem:fbs-prt",
    "lemma:corr-prt",
    "lemma:fbs-corr",
)


def covered_anchors() -> set[str]:
    return {spec.anchor for spec in CHECKS.values()}


# ---------------------------------------------------------------- corpus


@dataclass
class Corpus:
    entries: list[tuple[str, BooleanFunction]] = field(default_factory=list)

    def add(self, label: str, f: BooleanFunction) -> None:
        if any(label == l for l, _ in self.entries):
            raise ValueError(f"duplicate corpus label {label!r}")
        self.entries.append((label, f))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def extend(self, other: Corpus) -> None:
        for label, f in other:
            if not any(label == l for l, _ in self.entries):
                self.add(label, f)


def all_functions(n: int) -> Corpus:
    if n > 3:
        raise ValueError("exhaustive corpora are limited to n <= 3")
    c = Corpus()
    for t in range(1 << (1 << n)):
        table = tuple((t >> k) & 1 for k in range(1 << n))
        f = BooleanFunction(n, table)
        c.add(f"n{n}:{f.to_string()}", f)
    return c


NAMED_FAMILIES: tuple[tuple[str, tuple[int, ...]], ...] = (
    ("AND", (2,)),
    ("AND", (4,)),
    ("OR", (2,)),
    ("OR", (4,)),
    ("XOR", (2,)),
    ("XOR", (4,)),
    ("MAJ", (3,)),
    ("MAJ", (5,)),
    ("TRIBES", (2, 2)),
    ("TRIBES", (3, 2)),
)


def family_label(name: str, params: Sequence[int]) -> str:
    return f"{name}({','.join(map(str, params))})"


def families_corpus() -> Corpus:
    c = Corpus()
    for name, params in NAMED_FAMILIES:
        c.add(family_label(name, params), family(name, *params))
    return c


def random_corpus(seed: int = RANDOM_CORPUS_SEED, count: int = RANDOM_CORPUS_COUNT) -> Corpus:
    rng = random.Random(seed)
    c = Corpus()
    for k in range(count):
        n = RANDOM_CORPUS_ARITIES[k % len(RANDOM_CORPUS_ARITIES)]
        f = BooleanFunction(n, tuple(rng.randint(0, 1) for _ in range(1 << n)))
        c.add(f"random{k}:n{n}:{f.to_string()}", f)
    return c


def build_corpus(spec: str) -> Corpus:
    """Comma-separated corpus names: ``all-n1..all-n3``, ``families``, ``random``."""
    out = Corpus()
    for name in (s.strip() for s in spec.split(",") if s.strip()):
        if name.startswith("all-n"):
            part = all_functions(int(name[5:]))
        elif name == "families":
            part = families_corpus()
        elif name == "random":
            part = random_corpus()
        elif name == "default":
            part = all_functions(3)
            part.extend(families_corpus())
        else:
            raise ValueError(f"unknown corpus {name!r}")
        out.extend(part)
    if not len(out):
        raise ValueError("corpus is empty")
    return out


# Simulator and composition checks only run on these truth tables.
DESIGNATED = {
    family(name, *params).table: family_label(name, params)
    for name, params in (("AND", (2,)), ("OR", (2,)), ("MAJ", (3,)), ("TRIBES", (2, 2)))
}


# ---------------------------------------------------------------- report


@dataclass
class CheckRecord:
    label: str
    check: str
    anchor: str
    status: str  # pass | fail | skipped
    values: dict = field(default_factory=dict)
    runtime: float = 0.0


@dataclass
class VerificationReport:
    records: list[CheckRecord]
    eps_grid: list[Fraction]
    seed: int

    @property
    def failed(self) -> list[CheckRecord]:
        return [r for r in self.records if r.status == "fail"]

    @property
    def ok(self) -> bool:
        return not self.failed

    def summary(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for r in self.records:
            d = out.setdefault(r.check, {"pass": 0, "fail": 0, "skipped": 0})
            d[r.status] += 1
        return dict(sorted(out.items()))

    def to_dict(self, timing: bool = False) -> dict:
        recs = []
        for r in self.records:
            d = {
                "function": r.label,
                "check": r.check,
                "anchor": r.anchor,
                "status": r.status,
                "values": r.values,
            }
            if timing:
                d["runtime"] = r.runtime
            recs.append(d)
        return {
            "seed": self.seed,
            "eps": self.eps_grid,
            "ok": self.ok,
            "summary": self.summary(),
            "records": recs,
        }


@dataclass
class VerifyOptions:
    one_sided_trials: int = 400
    las_vegas_trials: int = 200
    random_products: int = 5
    prt_max_n: int = 5
    ec_rounds: int = 2
    corrupt_fc: bool = False  # negative control: break the FC scheme handed to Kulkarni-Tal


def _record(records, label, check, fn: Callable[[], tuple[str, dict]]):
    t0 = time.perf_counter()
    try:
        status, values = fn()
    except Exception as exc:  # a crashing check is a failing check
        status, values = "fail", {"error": f"{type(exc).__name__}: {exc}"}
    records.append(
        CheckRecord(label, check, CHECKS[check].anchor, status, values, time.perf_counter() - t0)
    )


def _fbs_maximizer(f: BooleanFunction) -> tuple[Fraction, int]:
    vals = [fractional_block_sensitivity_at(f, x)[0] for x in range(f.size)]
    best = max(vals)
    return best, vals.index(best)


def _passed(ok: bool) -> str:
    return "pass" if ok else "fail"


def verify_function(
    label: str, f: BooleanFunction, eps_grid: Sequence[Fraction], seed: int, opts: VerifyOptions
) -> list[CheckRecord]:
    records: list[CheckRecord] = []
    C, C0, C1, _ = certificate_complexity(f)
    s, _ = sensitivity(f)
    bs, _, _ = block_sensitivity(f)
    FC, V = fractional_certificate(f)
    ctx = {}

    def chain():
        D, _ = decision_tree_depth(f)
        fbs, _ = fractional_block_sensitivity(f)
        ctx["fbs"] = fbs
        ok = s <= bs <= fbs == FC <= C <= D <= C0 * C1
        return _passed(ok), {"s": s, "bs": bs, "fbs": fbs, "FC": FC, "C": C, "D": D, "C0": C0, "C1": C1}

    def duality():
        fbs = ctx.get("fbs") or fractional_block_sensitivity(f)[0]
        return _passed(fbs == FC), {"FC": FC, "fbs": fbs}

    def bounds():
        if "ec" not in ctx:
            ctx["ec"] = ec_bounds(f, opts.ec_rounds)
        return ctx["ec"]

    def fc_le_ec():
        if f.n > 8:
            return "skipped", {"reason": "n > 8"}
        vals = bounds().candidates
        ok = all(
            (v >= FC) if isinstance(v, Fraction) else float(v) >= float(FC) - FLOAT_SLACK
            for v in vals.values()
        )
        return _passed(ok), {"FC": FC, "candidates": vals}

    def ec_le_c():
        W = weights_from_certificates(f)
        viol = check_ec_feasible(f, W)
        return _passed(viol is None and W.value == C), {"value": W.value, "C": C}

    def sandwich():
        if f.n > 8:
            return "skipped", {"reason": "n > 8"}
        b = bounds()
        up = b.upper
        if b.exact:
            ok = FC <= up <= C and C <= up * up
        else:
            u = float(up)
            ok = float(FC) - FLOAT_SLACK <= u <= C + FLOAT_SLACK and C <= u * u + FLOAT_SLACK
        return _passed(ok), {"FC": FC, "EC_upper": up, "C": C, "method": b.upper_method}

    def kulkarni():
        scheme = V
        if opts.corrupt_fc:
            x = next((x for x in range(f.size) if any(V[x])), None)
            if x is not None:
                scheme = tuple(tuple(Fraction(0) for _ in v) if k == x else v for k, v in enumerate(V))
        try:
            viol = kulkarni_tal_check(f, scheme)
        except ValueError as exc:
            return "fail", {"error": str(exc)}
        if viol is None:
            return "pass", {}
        return "fail", {"x": viol.x, "y": viol.y, "sum": viol.total}

    def sqrt_bound():
        W = weights_from_fc_sqrt(f, V, s)
        viol = check_ec_feasible(f, W, FLOAT_SLACK)
        bound = sqrt_scheme_bound(s, FC)
        ok = viol is None and float(W.value) <= bound + FLOAT_SLACK
        return _passed(ok), {"value": float(W.value), "bound": bound, "feasible": viol is None}

    _record(records, label, "measure-chain", chain)
    _record(records, label, "fc-fbs-duality", duality)
    _record(records, label, "fc-le-ec", fc_le_ec)
    _record(records, label, "ec-le-c", ec_le_c)
    _record(records, label, "ec-sandwich", sandwich)
    _record(records, label, "kulkarni-tal", kulkarni)
    _record(records, label, "ec-sqrt-bound", sqrt_bound)

    prt_cache: dict[Fraction, Fraction] = {}

    def prt_value(e: Fraction) -> Fraction:
        if e not in prt_cache:
            prt_cache[e] = partition_bound(f, e).value
        return prt_cache[e]

    for eps in eps_grid:
        tag = f"eps={eps}"

        def fbs_prt(eps=eps):
            if f.n > opts.prt_max_n:
                return "skipped", {"reason": f"n > {opts.prt_max_n}"}
            v = prt_value(eps / 4)
            return _passed(fbs_prt_holds(v, bs, eps)), {"eps": eps, "prt_value": v, "bs": bs}

        def ceps_prt(eps=eps):
            if f.n > opts.prt_max_n:
                return "skipped", {"reason": f"n > {opts.prt_max_n}"}
            if not 2 * eps < Fraction(1, 2):
                return "skipped", {"reason": "2 eps >= 1/2"}
            v = prt_value(eps)
            rng = random.Random(f"{seed}:{f.to_string()}:{eps}")
            mus = [uniform(f.n)] + [random_product(f.n, rng) for _ in range(opts.random_products)]
            worst = max(corr_min_product(f, mu, 2 * eps)[1] for mu in mus)
            return _passed(ceps_prt_holds(worst, v, eps)), {"eps": eps, "prt_value": v, "max_corr": worst}

        def fbs_corr(eps=eps):
            if f.is_constant():
                return "skipped", {"reason": "constant function"}
            fbs, x_star = _fbs_maximizer(f)
            b = f(x_star)
            rows = []
            ok = True
            for c in (Fraction(1, 10), Fraction(1, 100)):
                if not c < 1 - eps:
                    continue
                mu = adversarial_distribution(f, x_star, c, eps)
                r = corruption_bound(f, b, mu, eps)
                bound = fbs_corr_bound(fbs, eps, c)
                ok &= r is not None and r.size >= bound
                rows.append({"c": c, "corr": None if r is None else r.size, "bound": bound})
            return _passed(ok), {"eps": eps, "fbs": fbs, "x_star": x_star, "rows": rows}

        _record(records, f"{label} [{tag}]", "fbs-prt", fbs_prt)
        _record(records, f"{label} [{tag}]", "ceps-prt", ceps_prt)
        _record(records, f"{label} [{tag}]", "fbs-corr", fbs_corr)

        if f.table not in DESIGNATED:
            continue

        def one_sided(eps=eps):
            W = weights_from_certificates(f)
            rows = []
            ok = True
            for b in (0, 1):
                st = estimate_one_sided_error(f, W, b, eps, opts.one_sided_trials, seed)
                limit = float(eps) + 3 * math.sqrt(float(eps) * (1 - float(eps)) / opts.one_sided_trials)
                safe = all(v["errors"] == 0 for x, v in st.per_input.items() if f(x) != b)
                worst = max((v["error_rate"] for x, v in st.per_input.items() if f(x) == b), default=0.0)
                ok &= safe and worst <= limit and st.max_iterations <= st.budget
                rows.append({"b": b, "budget": st.budget, "worst_error": worst, "limit": limit})
            return _passed(ok), {"eps": eps, "rows": rows}

        def las_vegas(eps=eps):
            b = bounds()
            st = estimate_las_vegas(f, b.witness, opts.las_vegas_trials, seed)
            wrong = sum(v["errors"] for v in st.per_input.values())
            ceiling = 4 * float(b.upper) ** 2
            return _passed(wrong == 0 and st.mean_queries <= ceiling), {
                "wrong": wrong,
                "mean_queries": st.mean_queries,
                "ceiling": ceiling,
            }

        def alg2(eps=eps):
            if not eps < Fraction(1, 2):
                return "skipped", {"reason": "eps >= 1/2"}
            rng = random.Random(f"{seed}:alg2:{f.to_string()}:{eps}")
            mus = [uniform(f.n)] + [random_product(f.n, rng) for _ in range(2)]
            rows, ok = [], True
            for mu in mus:
                r = exact_distributional_error(f, mu, eps)
                disjoint = all(blocks_pairwise_disjoint(t) for t in r.traces.values())
                ok &= r.error <= 4 * eps and r.max_iterations <= max(4 * bs - 1, 1) and disjoint
                rows.append({"marginals": mu.marginals, "error": r.error, "iterations": r.max_iterations})
            return _passed(ok), {"eps": eps, "bs": bs, "rows": rows}

        def d_corr(eps=eps):
            if not eps < Fraction(1, 2) or f.is_constant():
                return "skipped", {"reason": "eps >= 1/2 or constant"}
            mu = uniform(f.n)
            r = exact_distributional_error(f, mu, eps)
            sizes = [it["subcube"].codim for t in r.traces.values() for it in t.iterations]
            K = max(sizes, default=0)
            _, x_star = _fbs_maximizer(f)
            adv = corruption_bound(f, f(x_star), adversarial_distribution(f, x_star, Fraction(1, 100), eps), eps)
            L = max(K, adv.size if adv else 0)
            return _passed(r.max_queries <= 4 * L * L), {"queries": r.max_queries, "L": L}

        _record(records, f"{label} [{tag}]", "ec-one-sided", one_sided)
        _record(records, f"{label} [{tag}]", "ec-las-vegas", las_vegas)
        _record(records, f"{label} [{tag}]", "alg2-error", alg2)
        _record(records, f"{label} [{tag}]", "d-corr", d_corr)

    if f.table in DESIGNATED and f.n <= 3:

        def or_comp():
            m = 2
            g = f
            F = compose_or(g, m)
            _, VF = fractional_certificate(F)
            W = weights_or_composition(g, m, VF)
            CF = certificate_complexity(F)[0]
            viol = check_ec_feasible(F, W)
            return _passed(viol is None and W.value <= CF), {"m": m, "value": W.value, "C": CF}

        _record(records, label, "or-composition", or_comp)
    return records


def _verify_entry(args):
    return verify_function(*args)


def verify_inequalities(
    corpus: Corpus,
    eps_grid: Iterable,
    seed: int = 0,
    opts: VerifyOptions | None = None,
    jobs: int = 1,
) -> VerificationReport:
    """Run every applicable check on every corpus function."""
    if not len(corpus):
        raise ValueError("corpus is empty")
    opts = opts or VerifyOptions()
    eps_grid = [Fraction(e) for e in eps_grid]
    work = [(label, f, eps_grid, seed, opts) for label, f in corpus]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_verify_entry, work, chunksize=4))
    else:
        chunks = [_verify_entry(w) for w in work]
    records = sorted((r for c in chunks for r in c), key=lambda r: (r.label, r.check))
    return VerificationReport(records, eps_grid, seed)
