"""Numbered acceptance criteria; a PASS/FAIL line per criterion is printed at the end of the run."""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction

import pytest

from ecquery.boolfn import compose_or, family, from_truth_table
from ecquery.distmeasures import (
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
from ecquery.ec import (
    FLOAT_SLACK,
    check_ec_feasible,
    ec_bounds,
    sqrt_scheme_bound,
    weights_from_certificates,
    weights_from_fc_sqrt,
    weights_or_composition,
)
from ecquery.harness import all_functions
from ecquery.measures import (
    block_sensitivity,
    certificate_complexity,
    decision_tree_depth,
    fractional_block_sensitivity,
    fractional_block_sensitivity_at,
    fractional_certificate,
    kulkarni_tal_check,
    sensitivity,
)
from ecquery.simulators import (
    blocks_pairwise_disjoint,
    estimate_las_vegas,
    estimate_one_sided_error,
    exact_distributional_error,
)

F = Fraction
SEED = 20170606

NAMED = [
    family("AND", 2),
    family("AND", 4),
    family("OR", 2),
    family("OR", 4),
    family("XOR", 2),
    family("XOR", 4),
    family("MAJ", 3),
    family("TRIBES", 2, 2),
    family("TRIBES", 3, 2),
]
CORPUS = [f for _, f in all_functions(3)] + NAMED
SMALL = [f for n in (1, 2, 3) for _, f in all_functions(n)]


@pytest.fixture(scope="module")
def fc_data():
    return {f: fractional_certificate(f) for f in CORPUS}


@pytest.mark.criterion(1, "FC = fbs exactly on all arity-3 functions and named families, < 60 s")
def test_fc_equals_fbs(fc_data):
    t0 = time.perf_counter()
    for f in CORPUS:
        fbs, _ = fractional_block_sensitivity(f)  # raises on a per-input mismatch
        assert fbs == fc_data[f][0], f
    assert time.perf_counter() - t0 < 60


@pytest.mark.criterion(2, "s <= bs <= fbs <= C <= D <= C0*C1 on the corpus")
def test_measure_chain(fc_data):
    for f in CORPUS:
        C, C0, C1, _ = certificate_complexity(f)
        s, _ = sensitivity(f)
        bs, _, _ = block_sensitivity(f)
        D, _ = decision_tree_depth(f)
        fbs = fc_data[f][0]
        assert s <= bs <= fbs <= C <= D <= C0 * C1, f


@pytest.mark.criterion(3, "FC <= EC_upper <= C and C <= EC_upper^2")
def test_ec_sandwich(fc_data):
    for f in CORPUS:
        C = certificate_complexity(f)[0]
        FC = fc_data[f][0]
        b = ec_bounds(f)
        assert b.lower == FC
        if b.exact:
            assert check_ec_feasible(f, b.witness) is None
            assert FC <= b.upper <= C and C <= b.upper**2, f
        else:
            u = float(b.upper)
            assert check_ec_feasible(f, b.witness, FLOAT_SLACK) is None
            assert float(FC) - FLOAT_SLACK <= u <= C + FLOAT_SLACK, f
            assert C <= u * u + FLOAT_SLACK, f


@pytest.mark.criterion(4, "Kulkarni-Tal minima sum >= 1 for optimal FC schemes, all n <= 3")
def test_kulkarni_tal():
    for f in SMALL:
        _, V = fractional_certificate(f)
        assert kulkarni_tal_check(f, V) is None, f


@pytest.mark.criterion(5, "sqrt-construction value <= 1.5*sqrt(3s)*FC, tol 1e-9")
def test_sqrt_bound(fc_data):
    for f in CORPUS:
        FC, V = fc_data[f]
        s = sensitivity(f)[0]
        W = weights_from_fc_sqrt(f, V, s)
        assert check_ec_feasible(f, W, FLOAT_SLACK) is None, f
        assert float(W.value) <= sqrt_scheme_bound(s, FC) + 1e-9, f


@pytest.mark.criterion(6, "one-sided algorithm on TRIBES(2,2), b=0, eps=1/10, 10^4 trials, < 30 s")
def test_one_sided_tribes():
    f = family("TRIBES", 2, 2)
    W = weights_from_certificates(f)
    assert W.value == 2
    t0 = time.perf_counter()
    st = estimate_one_sided_error(f, W, 0, F(1, 10), 10**4, seed=SEED)
    elapsed = time.perf_counter() - t0
    assert st.budget == 40
    limit = 0.1 + 3 * math.sqrt(0.09 / 10**4)
    for x, v in st.per_input.items():
        if f(x) == 1:
            assert v["errors"] == 0, x
        else:
            assert v["error_rate"] <= limit, (x, v)
    assert elapsed < 30


@pytest.mark.criterion(7, "zero-error variant: 10^4 trials per input on TRIBES(2,2) and MAJ3, never wrong")
def test_las_vegas():
    for f in (family("TRIBES", 2, 2), family("MAJ", 3)):
        b = ec_bounds(f)
        st = estimate_las_vegas(f, b.witness, 10**4, seed=SEED)
        assert all(v["errors"] == 0 for v in st.per_input.values())
        print(f"mean distinct queries {f.to_string()}: {st.mean_queries:.4f}")
        assert st.mean_queries <= 4 * float(b.upper) ** 2


@pytest.mark.criterion(8, "corruption walk, uniform, eps=1/16: error <= 1/4, iterations <= 4bs-1, disjoint S, < 10 s")
def test_corruption_walk():
    t0 = time.perf_counter()
    for f in (family("TRIBES", 2, 2), family("MAJ", 3)):
        bs = block_sensitivity(f)[0]
        r = exact_distributional_error(f, uniform(f.n), F(1, 16))
        assert r.error <= F(1, 4)
        assert r.max_iterations <= 4 * bs - 1
        assert all(blocks_pairwise_disjoint(t) for t in r.traces.values())
    assert time.perf_counter() - t0 < 10


@pytest.mark.criterion(9, "prt_0(identity) value 4; prt_{eps/4} >= eps*bs + log2(eps) - 2 for n <= 3")
def test_partition_bound():
    assert partition_bound(from_truth_table("01"), 0).value == 4
    for f in SMALL:
        bs = block_sensitivity(f)[0]
        for eps in (F(1, 16), F(1, 8), F(1, 4)):
            v = partition_bound(f, eps / 4).value
            assert fbs_prt_holds(v, bs, eps), (f, eps)


@pytest.mark.criterion(10, "min_b corr_{1/4} <= 3*prt_{1/8} on 20 random product distributions, n <= 3")
def test_corr_vs_prt():
    rng = random.Random(SEED)
    eps = F(1, 8)
    for f in SMALL:
        v = partition_bound(f, eps).value
        for _ in range(20):
            mu = random_product(f.n, rng)
            _, size = corr_min_product(f, mu, 2 * eps)
            assert ceps_prt_holds(size, v, eps), (f, mu)


@pytest.mark.criterion(11, "adversarial mu_c: corr_{1/8} >= fbs(1-eps-c)/(1-eps-c+eps c) for OR2, MAJ3, TRIBES(2,2)")
def test_fbs_corr():
    eps = F(1, 8)
    for f in (family("OR", 2), family("MAJ", 3), family("TRIBES", 2, 2)):
        vals = [fractional_block_sensitivity_at(f, x)[0] for x in range(f.size)]
        fbs = max(vals)
        x_star = vals.index(fbs)
        for c in (F(1, 10), F(1, 100)):
            mu = adversarial_distribution(f, x_star, c, eps)
            r = corruption_bound(f, f(x_star), mu, eps)
            assert r is not None and r.size >= fbs_corr_bound(fbs, eps, c)


@pytest.mark.criterion(12, "OR-composition scheme on compose_or(AND3, 3) feasible with value <= C, < 60 s")
def test_or_composition():
    t0 = time.perf_counter()
    g = family("AND", 3)
    f = compose_or(g, 3)
    assert f.n == 9
    _, V = fractional_certificate(f)
    W = weights_or_composition(g, 3, V)
    assert W.exact
    assert check_ec_feasible(f, W) is None
    assert W.value <= certificate_complexity(f)[0]
    assert time.perf_counter() - t0 < 60
