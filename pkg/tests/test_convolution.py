import math
import random
from fractions import Fraction

import pytest

from altsum.convolution import (
    alternating_sum_direct,
    alternating_sum_example,
    alternating_sum_via_kernel,
    alternating_sums_at,
    kernel_of,
    kk_identity_check,
    kk_sign_probe,
    plain_sums_at,
    tq_multiplicativity_probe,
    tq_sign,
    tq_sum,
    validate_qset,
    verify_convolution,
)
from altsum.errors import DomainError
from altsum.functions import REGISTRY, evaluate, function_ids, get_function

F = Fraction


def test_kernel_sigma():
    k = kernel_of(REGISTRY["sigma"], 8)
    assert k.values.coeffs == [1, -6, 4, 0, 0, 0, 0, 0, 0]


def test_kernel_gcd_sum():
    # -6 once, then constant 2
    k = kernel_of(REGISTRY["gcd_sum"], 12)
    assert k[1] == -6
    assert all(k[nu] == 2 for nu in range(2, 13))


def test_kernel_kappa():
    k = kernel_of(REGISTRY["kappa"], 12)
    for nu in range(1, 13):
        assert k[nu] == 4 * (-1) ** nu


def test_kernel_mu_sq():
    k = kernel_of(REGISTRY["mu_sq"], 12)
    for nu in range(1, 13):
        assert k[nu] == 2 * (-1) ** nu


def test_kernel_recip_kappa():
    # h(2^nu) = -2^(1-nu)
    k = kernel_of(get_function("1/kappa"), 12)
    for nu in range(1, 13):
        assert k[nu] == -F(2, 2**nu)
    assert [k[1], k[2], k[3]] == [-1, F(-1, 2), F(-1, 4)]


def test_kernel_abelian_pentagonal_support():
    # kernel values land in {-2, 0, 2} with sign flips at pentagonal offsets
    k = kernel_of(REGISTRY["abelian"], 60)
    pent = set()
    j = 1
    while j * (3 * j - 1) // 2 <= 60:
        pent.add(j * (3 * j - 1) // 2)
        pent.add(j * (3 * j + 1) // 2)
        j += 1
    for nu in range(1, 61):
        v = k[nu]
        assert v in (-2, 0, 2), nu
        assert (v != 0) == (nu in pent), nu


def test_kernel_depth_and_indexing():
    k = kernel_of(REGISTRY["phi"], 5)
    assert k.depth() == 5
    assert k[0] == 1


@pytest.mark.parametrize("fid", function_ids())
def test_convolution_identity_small(fid, table):
    assert verify_convolution(REGISTRY[fid], 10**4, table)


def test_convolution_identity_reciprocal(table):
    assert verify_convolution(get_function("1/sigma"), 3000, table)
    assert verify_convolution(get_function("1/phi"), 3000, table)


def test_pointwise_identity_by_hand(table):
    # n = 4: (-1)^3 sigma(4) = h(1) s(4) + h(2) s(2) + h(4) s(1)
    s = REGISTRY["sigma"]
    lhs = -evaluate(s, 4, table)
    rhs = 1 * evaluate(s, 4, table) + (-6) * evaluate(s, 2, table) + 4 * evaluate(s, 1, table)
    assert lhs == rhs == -7


@pytest.mark.parametrize("fid", ["phi", "sigma", "tau", "mu_sq", "beta", "1/sigma"])
def test_direct_equals_kernel(fid, table):
    f = get_function(fid)
    for x in (10**3, 10**4):
        assert alternating_sum_direct(f, x, table) == alternating_sum_via_kernel(f, x, table)


@pytest.mark.parametrize("fid", ["phi", "tau", "gcd_sum", "1/kappa"])
def test_direct_equals_example_oracle(fid, table):
    # third, sieve-free route over tiny ranges
    f = get_function(fid)
    for x in (1, 2, 17, 100, 257):
        assert alternating_sum_direct(f, x, table) == alternating_sum_example(f, x)


def test_known_small_sums(table):
    assert alternating_sum_direct(REGISTRY["tau"], 6, table) == -4
    # 1 - 1 + 2 - 2 + 4 - 2 = 2
    assert alternating_sum_direct(REGISTRY["phi"], 6, table) == 2


def test_sums_at_match_single_calls(table):
    f = REGISTRY["psi"]
    grid = [10, 100, 1000]
    alt = alternating_sums_at(f, grid, table)
    plain = plain_sums_at(f, grid, table)
    for x in grid:
        assert alt[x] == alternating_sum_direct(f, x, table)
    assert plain[1000] == sum(evaluate(f, n, table) for n in range(1, 1001))


def test_validate_qset():
    assert validate_qset([3, 2, 2]) == (2, 3)
    with pytest.raises(DomainError):
        validate_qset([4])
    with pytest.raises(DomainError):
        validate_qset([1])


def test_tq_sign():
    assert tq_sign(35, (2, 3)) == 1
    assert tq_sign(6, (2, 3)) == -1
    assert tq_sign(9, (2, 3)) == -1


def test_tq_reduces_to_alternating(table):
    f = REGISTRY["sigma"]
    for x in (10, 100, 1000):
        assert tq_sum(f, (2,), x, table) == alternating_sum_direct(f, x, table)


def test_tq_example(table):
    assert tq_sum(REGISTRY["sigma"], (2, 3), 7, table) == -11


def test_tq_brute_force(table):
    f = REGISTRY["phi"]
    q = (3, 5)
    want = sum(tq_sign(n, q) * evaluate(f, n, table) for n in range(1, 301))
    assert tq_sum(f, q, 300, table) == want


def test_tq_multiplicativity_iff_singleton():
    ok, witness = tq_multiplicativity_probe((3,), bound=60)
    assert ok and witness is None
    ok, witness = tq_multiplicativity_probe((2, 3), bound=60)
    assert not ok
    m, n = witness
    assert math.gcd(m, n) == 1


def test_kk_identity_small_and_random(table):
    for x in (1, 2, 10, 100):
        assert kk_identity_check(x, table)
    rng = random.Random(202)
    for x in [rng.randrange(2, 10**4) for _ in range(10)]:
        assert kk_identity_check(x, table), x


def test_kk_sign_probe_matches_brute_force(table):
    [(x, ratio)] = kk_sign_probe([10], table)
    kappa = REGISTRY["kappa"]
    alt = sum(F((-1) ** (n - 1), evaluate(kappa, n, table)) for n in range(1, 11))
    plain = sum(F(1, evaluate(kappa, n, table)) for n in range(1, 11))
    assert x == 10
    assert ratio == alt / plain
