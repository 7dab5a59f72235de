import warnings
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from conelag.errors import TruncationWarning
from conelag.meixner import (
    ExtractionSpec,
    MPPolynomial,
    RhoVector,
    check_difference_relations_general,
    check_difference_relations_rank1_exact,
    check_mp_rank1_relations,
    mp_expansion,
    mp_general,
    mp_rank1,
    phi_lambda,
)

from conftest import HERM2, LINE, SYM2


def hypergeometric_oracle(nu, n, lam):
    # classical Meixner-Pollaczek with parameter nu/2 at angle pi/2, argument -lambda, times i^-n
    nu = mpmath.mpf(nu.numerator) / nu.denominator
    b = nu / 2 - 1j * mpmath.mpf(lam)
    series = mpmath.fsum(mpmath.rf(-n, k) * mpmath.rf(b, k) / (mpmath.rf(nu, k) * mpmath.factorial(k)) * 2**k
                         for k in range(n + 1))
    return complex(mpmath.rf(nu, n) / mpmath.factorial(n) * series)


@given(st.integers(0, 12), st.sampled_from([Fraction(1), Fraction(3, 2), Fraction(2), Fraction(7, 3)]),
       st.floats(-2.0, 2.0))
def test_rank_one_against_hypergeometric_form(n, nu, lam):
    ours = mp_rank1(nu, n)(lam)
    ref = hypergeometric_oracle(nu, n, lam)
    assert abs(ours - ref) <= 1e-9 * max(1.0, abs(ref))


def test_coefficient_example():
    assert mp_rank1(2, 2).coefficients() == [(1, 0), (0, 0), (-2, 0)]


def test_phase_on_real_axis():
    # i^-n p_n is real for real lambda
    for n in range(6):
        vals = mp_rank1(Fraction(3, 2), n)(np.linspace(-2, 2, 9)) * (-1j) ** n
        assert np.allclose(np.imag(vals), 0.0, atol=1e-12)


def test_json_round_trip():
    p = mp_rank1(Fraction(3, 2), 5)
    q = MPPolynomial.from_json(p.to_json())
    assert q.coefficients() == p.coefficients() and q.degree == 5


@pytest.mark.parametrize("n", [0, 1, 5, 12])
@pytest.mark.parametrize("nu", [Fraction(1), Fraction(3, 2)])
def test_exact_rank_one_relations(nu, n):
    assert all(r.passed and r.abs_residual == 0 for r in check_mp_rank1_relations(nu, n))


@pytest.mark.parametrize("n", [1, 3, 6])
def test_general_relations_reduce_at_rank_one(n):
    assert all(r.passed for r in check_difference_relations_rank1_exact(Fraction(3, 2), n))
    unshifted = check_difference_relations_rank1_exact(Fraction(3, 2), n, shifted=False)
    assert unshifted[1].status == "fail"


def test_rank_one_extraction_matches_exact():
    rho = RhoVector.for_cone(LINE)
    got = mp_expansion(2.5, (0.3,), rho, 6)
    for n in range(7):
        assert abs(got[(n,)] - mp_rank1(Fraction(5, 2), n)(0.3)) < 1e-11


def test_rho_conventions():
    assert np.allclose(RhoVector(2, 1).rho, [-0.25, 0.25])
    assert np.allclose(RhoVector(2, 2, sign=1).rho, [0.5, -0.5])
    assert np.allclose(RhoVector(1).rho, [0.0])
    with pytest.raises(ValueError):
        RhoVector.for_cone(SYM2, 0)


@pytest.mark.parametrize("cone", [SYM2, HERM2])
def test_spherical_function_symmetric_in_lambda(cone):
    rho = RhoVector.for_cone(cone)
    x = np.diag([0.4, -0.2])
    lam = (0.3 + 0.2j, -0.4)
    assert np.isclose(phi_lambda(lam, x, rho), phi_lambda(lam[::-1], x, rho), rtol=1e-10)


def test_spherical_function_real_at_zero_index():
    val = phi_lambda((0.0, 0.0), np.diag([0.2, 0.3]), RhoVector.for_cone(SYM2))
    assert abs(val.imag) < 1e-12 and val.real > 0


def test_constant_term_is_one():
    rho = RhoVector.for_cone(SYM2)
    assert abs(mp_general(3.0, (0, 0), (0.2, -0.1), rho) - 1.0) < 1e-10


@pytest.mark.parametrize("sign", [1, -1])
def test_difference_relations_rank_two(sign):
    rho = RhoVector.for_cone(SYM2, sign)
    reports = check_difference_relations_general(3.0, (1, 0), (0.2, -0.35), rho)
    assert all(r.passed for r in reports), [r.to_dict() for r in reports]


def test_alternate_raising_coefficient_fails_rank_two():
    rho = RhoVector.for_cone(SYM2)
    first, _ = check_difference_relations_general(3.0, (1, 1), (0.2, -0.35), rho, c_reading="direct", shifted=False)
    assert first.status == "fail"


def test_coarse_grid_warns():
    rho = RhoVector.for_cone(SYM2)
    with pytest.warns(TruncationWarning):
        mp_general(3.0, (2, 0), (0.2, -0.1), rho, ext=ExtractionSpec(radius=0.35, grid=6))


def test_fine_grid_is_quiet():
    rho = RhoVector.for_cone(SYM2)
    with warnings.catch_warnings():
        warnings.simplefilter("error", TruncationWarning)
        mp_general(3.0, (1, 0), (0.2, -0.1), rho)
