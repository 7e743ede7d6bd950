from __future__ import annotations

import random
from fractions import Fraction

import oracles
import pytest
from conftest import boolean_functions
from hypothesis import given, settings, strategies as st

from ecquery.boolfn import Subcube, constant, family, from_truth_table
from ecquery.distmeasures import (
    GeneralDistribution,
    ProductDistribution,
    adversarial_distribution,
    ceps_prt_holds,
    condition_general,
    condition_product,
    corr_min_product,
    corruption_bound,
    fbs_corr_bound,
    fbs_prt_holds,
    format_distribution,
    parse_distribution,
    partition_bound,
    random_product,
    subcube_masses,
    uniform,
)
from ecquery.measures import fractional_block_sensitivity_at

F = Fraction
AND2 = family("AND", 2)
OR2 = family("OR", 2)
ID1 = from_truth_table("01")

marginals = st.lists(st.sampled_from([F(k, 8) for k in range(9)]), min_size=1, max_size=4)


def test_condition_examples():
    mu = uniform(2)
    assert condition_product(mu, {0: 1}).marginals == (1, F(1, 2))
    assert condition_product(mu, {}) == mu
    with pytest.raises(ValueError):
        condition_product(ProductDistribution((0, F(1, 2))), {0: 1})


def test_condition_general():
    mu = uniform(2)
    eta = condition_general(mu, Subcube.from_pattern("1*"))
    assert eta.mass_table == (0, F(1, 2), 0, F(1, 2))


def test_distribution_validation():
    with pytest.raises(ValueError):
        GeneralDistribution((F(1, 2), F(1, 4), F(1, 4)))
    with pytest.raises(ValueError):
        GeneralDistribution((F(1, 2), F(1, 4)))
    with pytest.raises(ValueError):
        ProductDistribution((F(3, 2),))


def test_parse_distribution():
    mu = parse_distribution("product: 1/2 1/3")
    assert mu.marginals == (F(1, 2), F(1, 3))
    g = parse_distribution("general: 1/4 1/4 1/4 1/4", n=2)
    assert g.n == 2
    assert parse_distribution(format_distribution(mu)) == mu
    assert parse_distribution(format_distribution(g)) == g
    with pytest.raises(ValueError):
        parse_distribution("general: 1/2 1/4 1/4 1/4")
    with pytest.raises(ValueError):
        parse_distribution("1/2 1/2")
    with pytest.raises(ValueError):
        parse_distribution("product: 1/2", n=2)


def test_corruption_examples():
    mu = uniform(2)
    r0 = corruption_bound(AND2, 0, mu, F(3, 10))
    assert r0.size == 0
    r1 = corruption_bound(AND2, 1, mu, F(3, 10))
    assert r1.size == 2 and r1.witness.pattern() == "11"
    assert corr_min_product(AND2, mu, F(3, 10)) == (0, 0)
    b, size = corr_min_product(family("XOR", 2), mu, F(1, 8))
    assert size == 2
    one = constant(3, 1)
    assert corr_min_product(one, random_product(3, random.Random(1)), F(1, 5)) == (1, 0)


def test_corruption_rejects_bad_eps():
    with pytest.raises(ValueError):
        corruption_bound(AND2, 0, uniform(2), 1)


def test_adversarial_distribution_example():
    mu = adversarial_distribution(OR2, 0, F(1, 10))
    assert mu.mass_table == (F(1, 10), F(9, 20), F(9, 20), 0)
    with pytest.raises(ValueError):
        adversarial_distribution(constant(2, 0), 0, F(1, 10))
    with pytest.raises(ValueError):
        adversarial_distribution(OR2, 0, F(9, 10), F(1, 8))


@pytest.mark.parametrize(
    "f, eps, value",
    [
        (ID1, 0, 4),
        (constant(2, 0), 0, 1),
        (constant(3, 1), F(1, 4), 1),
        (family("XOR", 2), 0, 16),
    ],
)
def test_partition_bound_examples(f, eps, value):
    r = partition_bound(f, eps)
    assert r.value == value
    assert abs(r.value - F(oracles.prt_value_float(f, eps)).limit_denominator(10**6)) < F(1, 10**6)


def test_partition_bound_prt_log():
    assert partition_bound(ID1, 0).prt == pytest.approx(2.0)


def test_exact_comparisons():
    # log2(4) = 2 >= (1/4)*2 + log2(1/4) - 2 = -3.5
    assert fbs_prt_holds(F(4), 2, F(1, 4))
    assert not fbs_prt_holds(F(1), 40, F(1, 2))
    assert ceps_prt_holds(3, F(2), F(1, 8))
    assert not ceps_prt_holds(4, F(2), F(1, 8))
    assert ceps_prt_holds(1, F(2), F(1, 3))
    assert fbs_corr_bound(F(2), F(1, 8), F(1, 10)) == F(2) * F(31, 40) / (F(31, 40) + F(1, 80))


@given(boolean_functions(1, 3), marginals)
def test_subcube_masses_match_brute_force(f, m):
    m = (m * f.n)[: f.n]
    mu = ProductDistribution(tuple(m))
    table = subcube_masses(f, mu)
    masses = mu.masses()
    for (mask, val), (tot, ones) in table.items():
        pts = oracles.members(f.n, mask, val)
        assert tot == sum(masses[x] for x in pts)
        assert ones == sum(masses[x] for x in pts if f(x))
    assert sum(masses) == 1
    assert all(masses[x] == oracles.product_mass(m, x) for x in range(f.size))


@given(boolean_functions(1, 3), marginals, st.sampled_from([F(0), F(1, 8), F(1, 4), F(1, 3)]))
def test_corruption_matches_brute_force(f, m, eps):
    mu = ProductDistribution(tuple((m * f.n)[: f.n]))
    masses = mu.masses()
    for b in (0, 1):
        r = corruption_bound(f, b, mu, eps)
        ref = oracles.corruption_size(f, b, masses, eps)
        assert (r.size if r else None) == ref


@settings(max_examples=15)
@given(boolean_functions(1, 2), st.sampled_from([F(0), F(1, 8), F(1, 4)]))
def test_partition_bound_matches_scipy(f, eps):
    r = partition_bound(f, eps)
    assert abs(float(r.value) - oracles.prt_value_float(f, eps)) < 1e-6
    covered = {x: F(0) for x in range(f.size)}
    for (z, A), w in r.weights.items():
        for x in A.members():
            covered[x] += w
    assert all(v == 1 for v in covered.values())


@given(boolean_functions(1, 3), st.sampled_from([F(1, 10), F(1, 100)]))
def test_fbs_corr_property(f, c):
    if f.is_constant():
        return
    eps = F(1, 8)
    vals = [fractional_block_sensitivity_at(f, x)[0] for x in range(f.size)]
    x_star = vals.index(max(vals))
    mu = adversarial_distribution(f, x_star, c, eps)
    assert sum(mu.mass_table) == 1
    r = corruption_bound(f, f(x_star), mu, eps)
    assert r is not None and r.size >= fbs_corr_bound(max(vals), eps, c)
