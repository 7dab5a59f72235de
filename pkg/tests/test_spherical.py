import json
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conelag.errors import GammaPole
from conelag.jordan import ConeStructure, det_delta, trace
from conelag.quadrature import QuadratureSpec
from conelag.spherical import (
    CoefficientTable,
    Partition,
    binomial_coeffs,
    c_coeff,
    dim_pm,
    gen_pochhammer,
    gindikin_gamma,
    jack_expansion,
    partitions_of,
    partitions_up_to,
    psi_eigs,
    psi_norm_sq,
    spherical_poly,
    spherical_poly_complex,
    step_coeff,
)

from conftest import HERM2, LINE, SYM2, cone_points, rotation

small_parts = st.sampled_from(partitions_up_to(2, 4))
cones = st.sampled_from([SYM2, HERM2])


def test_partition_validation():
    assert Partition([2, 1]).weight == 3
    assert Partition([1], 2) == (1, 0)
    with pytest.raises(ValueError):
        Partition([1, 2])
    with pytest.raises(ValueError):
        Partition([-1])


def test_partition_enumeration():
    assert partitions_of(4, 2) == [(4, 0), (3, 1), (2, 2)]
    assert len(partitions_up_to(2, 4)) == 9
    assert partitions_up_to(1, 3) == [(0,), (1,), (2,), (3,)]


def test_gamma_examples():
    assert gindikin_gamma(2, LINE) == 1.0
    assert np.isclose(gindikin_gamma(3, SYM2), np.sqrt(2 * np.pi) * 2 * np.sqrt(np.pi) * 0.75)
    with pytest.raises(GammaPole):
        gindikin_gamma((1, 0.5), SYM2)


@given(cones, small_parts, st.floats(1.5, 5.0))
def test_pochhammer_is_gamma_ratio(cone, m, nu):
    lam = tuple(nu + k for k in m)
    ratio = gindikin_gamma(lam, cone) / gindikin_gamma(nu, cone)
    assert np.isclose(float(gen_pochhammer(nu, m, cone)), ratio, rtol=1e-10)


def test_pochhammer_exact():
    assert gen_pochhammer(Fraction(3, 2), (2, 1), SYM2) == Fraction(3, 2) * Fraction(5, 2) * 1
    with pytest.raises(GammaPole):
        gen_pochhammer(Fraction(1, 2), (1, 1), SYM2)


def weyl_dimension(m, cone):
    # P_m is the GL(2) module with highest weight 2m (real case) or V_m (x) V_m^* (complex case)
    gap = m[0] - m[1]
    return 2 * gap + 1 if cone.multiplicity == 1 else (gap + 1) ** 2


@pytest.mark.parametrize("cone", [SYM2, HERM2])
@pytest.mark.parametrize("m", partitions_up_to(2, 6))
def test_dimension_matches_weyl_formula(cone, m):
    assert dim_pm(m, cone) == weyl_dimension(m, cone)


@pytest.mark.parametrize("cone", [SYM2, HERM2])
@pytest.mark.parametrize("k", range(7))
def test_dimensions_fill_homogeneous_polynomials(cone, k):
    assert sum(dim_pm(m, cone) for m in partitions_of(k, 2)) == comb(k + cone.dim - 1, k)


@given(cones, small_parts)
def test_psi_normalized_at_identity(cone, m):
    assert psi_eigs(m, (Fraction(1), Fraction(1)), cone) == 1


@given(cone_points(), st.floats(0.2, 3.0), small_parts)
def test_psi_homogeneous(x, t, m):
    assert np.isclose(spherical_poly(m, t * x, SYM2), t ** m.weight * spherical_poly(m, x, SYM2), rtol=1e-10)


@given(cone_points(2), st.floats(0, np.pi), st.floats(0, 2 * np.pi), small_parts)
def test_psi_unitarily_invariant(x, t, phi, m):
    k = rotation(t, phi, 2)
    assert np.isclose(spherical_poly(m, k @ x @ k.conj().T, HERM2), spherical_poly(m, x, HERM2), rtol=1e-10)


@given(cone_points())
def test_low_degree_psi(x):
    assert np.isclose(spherical_poly((1, 0), x, SYM2), trace(x) / 2)
    assert np.isclose(spherical_poly((1, 1), x, SYM2), det_delta(x))


def test_psi_determinant_example():
    assert spherical_poly((1, 1), np.diag([2.0, 4.0]), SYM2) == pytest.approx(8.0)


def test_zonal_coefficients():
    # alpha = 2: J_(2) = 3 m_(2) + 2 m_(1,1), and m_(2)(1,1) = 2
    table = jack_expansion((2, 0), SYM2)
    assert table[(2, 0)] == Fraction(3, 8) and table[(1, 1)] == Fraction(1, 4)


@given(cones, st.sampled_from(partitions_up_to(2, 3)), cone_points())
def test_binomials_reproduce_shifted_psi(cone, m, x):
    table = binomial_coeffs(m, cone)
    ev = np.linalg.eigvalsh(x)
    lhs = psi_eigs(m, ev + 1.0, cone)
    rhs = sum(float(c) * psi_eigs(n, ev, cone) for n, c in table.items())
    assert np.isclose(lhs, rhs, rtol=1e-10)


def test_binomial_rows():
    assert dict(binomial_coeffs((2,), LINE).items()) == {(0,): 1, (1,): 2, (2,): 1}


@pytest.mark.parametrize("cone", [SYM2, HERM2])
@pytest.mark.parametrize("m", partitions_up_to(2, 4))
def test_binomials_sum_to_classical_rows(cone, m):
    # psi_m(e + t e) = (1 + t)^|m|
    table = binomial_coeffs(m, cone)
    by_weight = [sum(c for n, c in table.items() if n.weight == k) for k in range(m.weight + 1)]
    assert by_weight == [comb(m.weight, k) for k in range(m.weight + 1)]


def test_binomials_independent_of_nodes():
    assert dict(binomial_coeffs((3, 1), HERM2, seed=0).items()) == dict(binomial_coeffs((3, 1), HERM2, seed=7).items())


def test_coefficient_table_json_round_trip():
    t = binomial_coeffs((2, 1), SYM2)
    back = CoefficientTable.from_json(t.to_json())
    assert dict(back.items()) == dict(t.items())
    assert json.loads(t.to_json())["rank"] == 2


def test_step_coefficients_rank_one():
    assert step_coeff((5,), 1, LINE) == 5
    assert c_coeff((5,), 1, LINE) == 1


def test_raising_coefficient_readings_differ():
    assert c_coeff((2, 1), 1, SYM2, "direct") != c_coeff((2, 1), 1, SYM2, "reflected")


@given(cones, small_parts, st.integers(1, 2))
def test_lowering_coefficient_is_binomial(cone, m, k):
    lower = list(m)
    lower[k - 1] -= 1
    if lower[k - 1] < 0 or (k == 1 and lower[0] < lower[1]):
        return
    assert step_coeff(m, k, cone) == binomial_coeffs(m, cone)[tuple(lower)]


def test_complex_index_agrees_with_partition():
    quad = QuadratureSpec()
    x = np.array([[1.2, 0.3], [0.3, 0.7]])
    for m in partitions_up_to(2, 3):
        assert np.isclose(spherical_poly_complex(m, x, SYM2, quad), spherical_poly(m, x, SYM2), rtol=1e-10)


def test_psi_norm_rank_one():
    # (1)_3 / (2)_3
    assert psi_norm_sq((3,), 2, LINE) == Fraction(1, 4)
