from fractions import Fraction

import pytest

from altsum.errors import CapacityError, DomainError
from altsum.functions import function_ids, get_function
from altsum.series import (
    CLOSED_FORMS,
    MULTINOMIAL_CAP,
    SERIES_CAP,
    CoefficientSeries,
    bell_coeffs,
    check_kaluza,
    closed_form_check,
    convolve,
    geometric_reciprocal_bound,
    reciprocal_coeffs,
    reciprocal_coeffs_multinomial,
)

F = Fraction


def recip_b(fid, n):
    return reciprocal_coeffs(bell_coeffs(get_function(fid), n)).coeffs


def test_local_coefficients_are_function_values():
    a = bell_coeffs(get_function("sigma"), 5)
    assert a.coeffs == [1, 3, 7, 15, 31, 63]
    a = bell_coeffs(get_function("1/kappa"), 4)
    assert a.coeffs == [1, F(1, 2), F(1, 2), F(1, 2), F(1, 2)]


def test_beta_local_series_closed_form():
    # (2^(nu+1) + (-1)^nu) / 3 at every order
    a = bell_coeffs(get_function("beta"), 40)
    for nu, c in enumerate(a.coeffs[1:], start=1):
        assert c == F(2 ** (nu + 1) + (-1) ** nu, 3)


def test_reciprocal_values_recip_sigma():
    assert recip_b("1/sigma", 3) == [1, F(-1, 3), F(-2, 63), F(-8, 945)]


def test_reciprocal_values_recip_sigma_star():
    assert recip_b("1/sigma_star", 4) == [
        1,
        F(-1, 3),
        F(-4, 45),
        F(-2, 135),
        F(32, 34425),
    ]


def test_reciprocal_values_recip_phi_star():
    assert recip_b("1/phi_star", 4) == [1, -1, F(2, 3), F(-10, 21), F(104, 315)]


def test_reciprocal_values_recip_tau():
    assert recip_b("1/tau", 3) == [1, F(-1, 2), F(-1, 12), F(-1, 24)]


def test_reciprocal_values_plain_sigma():
    # inverting sigma's own local series is a different object entirely
    assert recip_b("sigma", 3) == [1, -3, 2, 0]


@pytest.mark.parametrize(
    "fid",
    ["phi", "sigma", "beta", "sigma_bi", "wintner_demo", "1/sigma", "1/kappa_star"],
)
def test_reciprocal_is_inverse(fid):
    a = bell_coeffs(get_function(fid), 128)
    conv = convolve(a, reciprocal_coeffs(a), 128)
    assert conv == [F(1)] + [F(0)] * 128


@pytest.mark.parametrize("fid", ["sigma", "1/sigma", "phi_star", "beta", "1/gcd_sum"])
def test_multinomial_route_matches_recurrence(fid):
    a = bell_coeffs(get_function(fid), 12)
    fast = reciprocal_coeffs(a)
    slow = reciprocal_coeffs_multinomial(a, 12)
    assert fast.coeffs[:13] == slow.coeffs


def test_multinomial_cap():
    a = bell_coeffs(get_function("sigma"), 20)
    with pytest.raises(CapacityError):
        reciprocal_coeffs_multinomial(a, MULTINOMIAL_CAP + 1)


def test_series_cap():
    with pytest.raises(CapacityError):
        bell_coeffs(get_function("phi"), SERIES_CAP + 1)


def test_reciprocal_needs_unit_constant_term():
    s = CoefficientSeries(function_id="ad-hoc", origin="local", coeffs=[F(2), F(1)])
    with pytest.raises(DomainError):
        reciprocal_coeffs(s)


def test_kaluza_recip_sigma():
    rep = check_kaluza(bell_coeffs(get_function("1/sigma"), 64))
    assert rep.log_convex
    assert rep.first_violation is None
    assert rep.bounds_hold
    # sign pattern implied by the theorem
    assert all(c <= 0 for c in rep.reciprocal.coeffs[1:])


def test_kaluza_recip_tau_and_gcd_sum():
    for fid in ("1/tau", "1/gcd_sum"):
        rep = check_kaluza(bell_coeffs(get_function(fid), 64))
        assert rep.log_convex, fid
        assert rep.bounds_hold, fid


def test_kaluza_hypothesis_fails_for_recip_phi_star():
    # a_1^2 = 1 > a_0 a_2 = 1/3: the violation sits at the first step
    rep = check_kaluza(bell_coeffs(get_function("1/phi_star"), 64))
    assert not rep.log_convex
    assert rep.first_violation == 1
    assert rep.bounds_hold is None


def test_kaluza_hypothesis_fails_for_recip_sigma_star():
    rep = check_kaluza(bell_coeffs(get_function("1/sigma_star"), 64))
    assert not rep.log_convex
    # and indeed the sign conclusion breaks too: b_4 > 0
    assert rep.reciprocal.coeffs[4] == F(32, 34425) > 0


def test_kaluza_rejects_nonpositive_series():
    with pytest.raises(DomainError):
        check_kaluza(bell_coeffs(get_function("wintner_demo"), 8))


def test_geometric_bound_recip_sigma_bi():
    rep = geometric_reciprocal_bound(
        bell_coeffs(get_function("1/sigma_bi"), 64), F(4, 5), F(1, 2)
    )
    assert rep.hypothesis_holds
    assert rep.bound_holds
    assert all(m >= 0 for m in rep.margins)


def test_geometric_bound_recip_sigma():
    rep = geometric_reciprocal_bound(
        bell_coeffs(get_function("1/sigma"), 64), F(1), F(1, 2)
    )
    assert rep.hypothesis_holds
    assert rep.bound_holds


def test_geometric_bound_hypothesis_violation_reported():
    # a_1 = 1 for 1/phi_star exceeds A q = 1/2
    rep = geometric_reciprocal_bound(
        bell_coeffs(get_function("1/phi_star"), 16), F(1), F(1, 2)
    )
    assert not rep.hypothesis_holds
    assert rep.first_hypothesis_violation == 1
    assert rep.bound_holds is None


@pytest.mark.parametrize("key", sorted(CLOSED_FORMS, key=str))
def test_closed_forms_to_order_64(key):
    base, recip = key
    f = get_function(("1/" if recip else "") + base)
    rep = closed_form_check(f, 64)
    assert rep.equal, key
    if key == ("kappa_star", True):
        assert rep.modulus_bound_ok


def test_closed_form_unknown_id():
    with pytest.raises(DomainError):
        closed_form_check(get_function("tau_e"), 16)


def test_every_function_has_invertible_local_series():
    for fid in function_ids():
        a = bell_coeffs(get_function(fid), 32)
        assert a.coeffs[0] == 1
        b = reciprocal_coeffs(a)
        assert convolve(a, b, 32) == [F(1)] + [F(0)] * 32
