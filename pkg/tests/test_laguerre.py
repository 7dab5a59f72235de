import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from conelag.errors import UnsupportedCone
from conelag.laguerre import (
    LaguerreSpec,
    check_classical_relations,
    check_hermitian_diffops,
    check_euler_recurrence,
    check_recurrence_rank1_exact,
    classical_generating,
    classical_rodrigues,
    classical_sum,
    laguerre_fn,
    laguerre_fn_batch,
    laguerre_fn_matrix,
    laguerre_norm_sq,
    laguerre_poly,
)
from conelag.spherical import gen_pochhammer, partitions_up_to

from conftest import HERM2, LINE, SYM2, cone_points, rotation

LOW = partitions_up_to(2, 2)


@given(st.integers(0, 10), st.floats(0.6, 4.0), st.floats(0.0, 5.0))
def test_rank_one_matches_classical_laguerre(n, nu, x):
    ours = laguerre_poly(LaguerreSpec(nu, (n,), LINE), x)
    ref = math.factorial(n) * special.eval_genlaguerre(n, nu - 1, x)
    assert np.isclose(ours, ref, rtol=1e-9, atol=1e-9 * math.factorial(n))


def test_examples():
    assert laguerre_poly(LaguerreSpec(2.0, (1,), LINE), 0.5) == pytest.approx(1.5)
    assert laguerre_fn(LaguerreSpec(2.0, (1,), LINE), 0.5) == pytest.approx(np.exp(-0.5))
    assert laguerre_poly(LaguerreSpec(Fraction(3), (2,), LINE), (Fraction(1),)) == 3 * 4 - 2 * 4 * 1 + 1


@pytest.mark.parametrize("cone", [SYM2, HERM2])
@pytest.mark.parametrize("m", partitions_up_to(2, 3))
def test_value_at_origin_is_pochhammer(cone, m):
    nu = Fraction(7, 2)
    assert laguerre_poly(LaguerreSpec(nu, m, cone), (Fraction(0), Fraction(0))) == gen_pochhammer(nu, m, cone)


@given(cone_points(2), st.floats(0, np.pi), st.floats(0, 2 * np.pi), st.sampled_from(LOW))
def test_laguerre_function_is_unitarily_invariant(x, t, phi, m):
    spec = LaguerreSpec(3.0, m, HERM2)
    k = rotation(t, phi, 2)
    assert np.isclose(laguerre_fn(spec, k @ x @ k.conj().T), laguerre_fn(spec, x), rtol=1e-9, atol=1e-12)


@given(cone_points(), st.sampled_from(LOW))
def test_batch_and_matrix_forms_agree(x, m):
    spec = LaguerreSpec(3.0, m, SYM2)
    ref = laguerre_fn(spec, x)
    assert np.isclose(laguerre_fn_batch(spec, x[None])[0], ref, rtol=1e-10, atol=1e-14)
    assert np.isclose(laguerre_fn_matrix(spec, x[None].astype(complex))[0], ref, rtol=1e-9, atol=1e-14)


@pytest.mark.parametrize("n", range(6))
def test_norm_readings_rank_one(n):
    spec = LaguerreSpec(1, (n,), LINE)
    assert laguerre_norm_sq(spec) == pytest.approx(math.factorial(n) ** 2 / 2)
    assert laguerre_norm_sq(spec, "alternate") == pytest.approx(0.5)


@pytest.mark.parametrize("n", range(11))
def test_three_classical_formulas_agree_exactly(n):
    alpha, x = Fraction(3, 4), Fraction(5, 3)
    s = classical_sum(n, alpha, x)
    assert s == classical_rodrigues(n, alpha, x)
    assert s == classical_generating(10, alpha, x)[n]


@pytest.mark.parametrize("n", range(8))
def test_exact_recurrence_rank_one(n):
    reports = check_recurrence_rank1_exact(Fraction(5, 2), n)
    assert all(r.passed for r in reports), [r.to_dict() for r in reports if not r.passed]


def test_alternate_recurrence_fails_rank_one():
    assert not check_recurrence_rank1_exact(Fraction(5, 2), 3, "alternate")[0].passed


@pytest.mark.parametrize("cone", [SYM2, HERM2])
@pytest.mark.parametrize("m", LOW)
def test_recurrence_rank_two(cone, m):
    x = np.array([[1.1, 0.3], [0.3, 0.8]], dtype=complex if cone.multiplicity == 2 else float)
    if cone.multiplicity == 2:
        x[0, 1], x[1, 0] = 0.3 + 0.2j, 0.3 - 0.2j
    three_term, _ = check_euler_recurrence(LaguerreSpec(3.0, m, cone), x)
    assert three_term.passed, three_term.to_dict()


def test_alternate_recurrence_fails_rank_two():
    x = np.array([[1.1, 0.3], [0.3, 0.8]])
    report, _ = check_euler_recurrence(LaguerreSpec(3.0, (1, 0), SYM2), x, reading="alternate")
    assert report.status == "fail"


@pytest.mark.parametrize("m", LOW)
def test_hermitian_operators(m):
    x = np.array([[1.2, 0.2 - 0.4j], [0.2 + 0.4j, 0.9]])
    reports = check_hermitian_diffops(LaguerreSpec(3.0, m, HERM2), x)
    assert len(reports) == 3 and all(r.passed for r in reports), [r.to_dict() for r in reports]


def test_alternate_hermitian_eigenvalue_fails():
    x = np.array([[1.2, 0.2 - 0.4j], [0.2 + 0.4j, 0.9]])
    first = check_hermitian_diffops(LaguerreSpec(3.0, (1, 1), HERM2), x, reading="alternate")[0]
    assert first.status == "fail"


def test_hermitian_operators_need_complex_cone():
    with pytest.raises(UnsupportedCone, match="multiplicity 2"):
        check_hermitian_diffops(LaguerreSpec(3.0, (1, 0), SYM2), np.eye(2))


@given(st.integers(0, 6), st.floats(1.0, 4.0), st.floats(0.3, 3.0))
def test_classical_relations(n, nu, t):
    assert all(r.passed for r in check_classical_relations(nu, n, t))
