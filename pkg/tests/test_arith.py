import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from murmur import arith
from murmur.errors import DomainError, SizeError

import oracles


# ---------------------------------------------------------------------------
# sieve and multiplicative functions


def test_sieve_small_prime_lists():
    assert list(arith.sieve(10).primes) == [2, 3, 5, 7]
    assert list(arith.sieve(2).primes) == [2]


def test_sieve_prime_count_against_naive_oracle(tables):
    assert len(tables.primes) == len(oracles.naive_primes(10_000))
    assert len(tables.primes) == 1229


def test_sieve_spf_divides(tables):
    n = np.arange(2, tables.limit + 1)
    spf = tables.smallest_prime_factor[2:]
    assert np.all(n % spf == 0)


def test_sieve_rejects_bad_limits():
    with pytest.raises(DomainError):
        arith.sieve(1)
    with pytest.raises(SizeError):
        arith.sieve(2**40)


def test_sieve_tables_immutable(tables):
    with pytest.raises(ValueError):
        tables.primes[0] = 4


def test_mobius_values(tables):
    assert arith.mobius(1, tables) == 1
    assert arith.mobius(4, tables) == 0
    assert arith.mobius(30, tables) == -1
    for n in range(1, 200):
        assert arith.mobius(n, tables) == oracles.mobius_naive(n)


def test_phi_sigma_against_divisor_enumeration(tables):
    assert arith.euler_phi(1, tables) == 1
    assert arith.divisor_sigma(1, tables) == 1
    assert arith.euler_phi(12, tables) == 4
    assert arith.divisor_sigma(12, tables) == 28
    for n in range(1, 150):
        assert arith.divisor_sigma(n, tables) == sum(oracles.divisors(n))
        assert arith.euler_phi(n, tables) == oracles.phi_naive(n)
        assert arith.divisor_count(n, tables) == len(oracles.divisors(n))


def test_is_squarefree(tables):
    assert not arith.is_squarefree(18, tables)
    assert arith.is_squarefree(30, tables)


def test_table_range_errors(tables):
    with pytest.raises(DomainError):
        arith.mobius(tables.limit + 1, tables)


# ---------------------------------------------------------------------------
# Kronecker symbol


def test_kronecker_trivia():
    assert arith.kronecker(5, 1) == 1
    assert arith.kronecker(5, 5) == 0
    assert arith.kronecker(0, 1) == 1
    assert arith.kronecker(0, 7) == 0
    assert arith.kronecker(-1, 0) == 1
    assert arith.kronecker(3, 0) == 0


def test_kronecker_against_residue_table_oracle():
    # quadratic-residue brute force at odd prime bottoms, including (-7|3)
    assert arith.kronecker(-7, 3) == oracles.legendre_euler(-7, 3)
    for p in [3, 5, 7, 11, 13]:
        residues = {(r * r) % p for r in range(1, p)}
        for d in range(-30, 31):
            expect = 0 if d % p == 0 else (1 if d % p in residues else -1)
            assert arith.kronecker(d, p) == expect, (d, p)


@settings(max_examples=300)
@given(st.integers(-500, 500), st.integers(-200, 200))
def test_kronecker_matches_definition_oracle(d, n):
    assert arith.kronecker(d, n) == oracles.kronecker_oracle(d, n)


@given(st.integers(-100, 100), st.integers(1, 60))
def test_kronecker_multiplicative_in_bottom(d, n):
    for m in range(1, 20):
        assert arith.kronecker(d, m * n) == arith.kronecker(d, m) * arith.kronecker(d, n)


@given(st.sampled_from([5, 8, -7, -8, 12, 13, -3, -4, 17]), st.integers(1, 300))
def test_kronecker_periodicity(d, n):
    # period |d| once d = 0, 1 mod 4
    assert d % 4 in (0, 1)
    assert arith.kronecker(d, n) == arith.kronecker(d, n + abs(d))


# ---------------------------------------------------------------------------
# Kloosterman sums


def test_kloosterman_examples(tables):
    assert arith.kloosterman_direct(1, 1, 1) == 1.0
    assert abs(arith.kloosterman_direct(1, 1, 2) - 1.0) < 1e-12
    assert abs(arith.kloosterman_direct(1, 2, 3) - 2.0) < 1e-12
    assert abs(arith.kloosterman_fast(1, 1, 6, tables) - arith.kloosterman_direct(1, 1, 6)) < 1e-12
    assert abs(arith.kloosterman_fast(3, 5, 35, tables) - arith.kloosterman_direct(3, 5, 35)) < 1e-12


def test_kloosterman_ramanujan_case(tables):
    # S(0, 0; c) counts the units
    for c in [1, 2, 6, 12, 30, 100]:
        assert abs(arith.kloosterman_fast(0, 0, c, tables) - arith.euler_phi(c, tables)) < 1e-9


def test_kloosterman_against_complex_oracle(tables):
    for (m, n, c) in [(1, 1, 5), (2, 3, 7), (1, 4, 8), (5, 7, 36), (1, 1, 97), (11, 13, 360)]:
        re, im = oracles.kloosterman_complex(m, n, c)
        assert abs(im) < 1e-9
        assert abs(arith.kloosterman_direct(m, n, c) - re) < 1e-9
        assert abs(arith.kloosterman_fast(m, n, c, tables) - re) < 1e-9


def test_unit_inverse_tables_exact():
    for c in [2, 3, 8, 36, 97, 3600, 4099]:
        units, inv = arith._unit_tables(c)
        assert np.all((units * inv) % c == 1)


@settings(max_examples=200, deadline=None)
@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(1, 400))
def test_kloosterman_fast_equals_direct(tables, m, n, c):
    assert abs(arith.kloosterman_fast(m, n, c, tables) - arith.kloosterman_direct(m, n, c)) < 1e-9


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 100), st.integers(1, 100), st.integers(1, 300))
def test_kloosterman_symmetry_and_reduction(tables, m, n, c):
    s = arith.kloosterman_fast(m, n, c, tables)
    assert abs(s - arith.kloosterman_fast(n, m, c, tables)) < 1e-9
    assert abs(s - arith.kloosterman_fast(m + c, n, c, tables)) < 1e-9
    assert abs(s - arith.kloosterman_fast(m, n - c, c, tables)) < 1e-9


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 60), st.integers(1, 60), st.integers(1, 200), st.integers(1, 40))
def test_kloosterman_unit_twist(tables, m, n, c, a):
    if math.gcd(a, c) != 1:
        a = 1
    lhs = arith.kloosterman_fast(a * m, n, c, tables)
    rhs = arith.kloosterman_fast(m, a * n, c, tables)
    assert abs(lhs - rhs) < 1e-9


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 1000), st.integers(0, 1000), st.integers(1, 2000))
def test_weil_bound_random(tables, m, n, c):
    s = arith.kloosterman_fast(m, n, c, tables)
    assert abs(s) <= arith.weil_bound(m, n, c, tables) + 1e-9


def test_reality_sweep_sample():
    # the full c <= 5000 sweep runs in the acceptance suite
    rng = np.random.default_rng(11)
    for c in rng.integers(1, 5001, size=60):
        arith.kloosterman_direct(3, 7, int(c))  # raises if Im exceeds 1e-9


def test_kloosterman_many_preserves_order_and_accepts_map(tables):
    cs = list(range(1, 40))
    base = arith.kloosterman_many(2, 5, cs, tables)
    def eager_map(fn, items):
        return [fn(x) for x in items]
    alt = arith.kloosterman_many(2, 5, cs, tables, map_fn=eager_map)
    assert np.array_equal(base, alt)


def test_kloosterman_domain_errors(tables):
    with pytest.raises(DomainError):
        arith.kloosterman_direct(1, 1, 0)
    with pytest.raises(DomainError):
        arith.kloosterman_fast(1, 1, tables.limit + 1, tables)
