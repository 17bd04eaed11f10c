import numpy as np
import pytest

from oracles import eps_exponents, eps_super, reduction_residual
from ybforge.braiding import build_color_hecke
from ybforge.errors import InvalidInputError
from ybforge.grading import GradingGroup, factor_from_exponents, factor_supercommutation
from ybforge.linop import GradedBasis
from ybforge.superize import (
    build_rdelta,
    check_cocycle,
    check_reduction,
    compute_cocycle,
    delta_hat,
    z2_regrade,
)

Z2Z2 = GradingGroup((2, 2))


def z2z2_factor():
    return factor_from_exponents(Z2Z2, [[1, 0], [0, 1]], [[0, 0], [0, 0]], 1)


def z2z2_basis():
    return GradedBasis(Z2Z2, ((1, 0), (0, 1)))


def multiparameter():
    g = GradingGroup((0, 0, 0))
    f = factor_from_exponents(g, [[0] * 3] * 3, [[0, 1, -2], [-1, 0, 1], [2, -1, 0]], complex(0.8, 0.6))
    return f, GradedBasis.standard(g)


def test_regrading():
    f = z2z2_factor()
    b = GradedBasis(Z2Z2, ((1, 0), (1, 1), (0, 0)))
    rg = z2_regrade(b, f)
    assert rg.deltas == (1, 0, 0)
    assert rg.odd_labels == [1] and rg.even_labels == [2, 3]
    assert rg.z2_basis.grades == ((1,), (0,), (0,))


def test_cocycle_values():
    f = z2z2_factor()
    sigma = compute_cocycle(f)
    assert delta_hat(f, (1, 0), (0, 1)) == -1
    assert sigma((1, 0), (0, 1)) == -1
    assert sigma((0, 1), (1, 0)) == 1
    assert sigma((0, 0), (1, 1)) == 1


def test_cocycle_even_factor_is_upper_split():
    f, _ = multiparameter()
    sigma = compute_cocycle(f)
    g = f.group
    for i in range(3):
        for j in range(3):
            xi, xj = g.generator(i), g.generator(j)
            assert sigma(xi, xj) == pytest.approx(f(xi, xj) if i < j else 1)


def test_cocycle_super_is_trivial():
    sigma = compute_cocycle(factor_supercommutation())
    assert sigma((1,), (1,)) == 1


def test_cocycle_identities_sampled():
    for f in (z2z2_factor(), multiparameter()[0], factor_supercommutation()):
        res = check_cocycle(f, samples=200)
        assert max(res.values()) < 1e-12


def test_rdelta():
    f = z2z2_factor()
    rd = build_rdelta(f, [(1, 0), (0, 1)])
    assert rd.column((1, 2)) == {(2, 1): -1}
    assert rd.column((1, 1)) == {(1, 1): 1}
    with pytest.raises(InvalidInputError):
        build_rdelta(f, [(1, 0), (1, 0)])


@pytest.mark.parametrize("mode", ["split", "cocycle"])
def test_reduction_z2z2(mode):
    rep = check_reduction(build_color_hecke(z2z2_factor(), z2z2_basis(), 1.3), z2z2_basis(), z2z2_factor(), 1.3, mode=mode)
    assert rep.passed and rep.residual < 1e-9
    assert not rep.even


def test_reduction_literal_mode_double_counts():
    f, b = z2z2_factor(), z2z2_basis()
    rep = check_reduction(build_color_hecke(f, b, 1.3), b, f, 1.3, mode="literal")
    sig = lambda x, y: (-1) ** ((x[0] * y[1]) % 2)
    ref = reduction_residual(eps_exponents([[1, 0], [0, 1]], [[0, 0], [0, 0]], 1), [(1, 0), (0, 1)], 1.3, twist=sig)
    assert rep.residual == pytest.approx(ref) == pytest.approx(2.0)
    assert not rep.passed


def test_reduction_matches_dense_oracle():
    eps = eps_exponents([[1, 0], [0, 1]], [[0, 0], [0, 0]], 1)
    grades = [(1, 0), (0, 1), (1, 1), (1, 0)]
    b = GradedBasis(Z2Z2, tuple(grades))
    f = z2z2_factor()
    for q in (1.3, complex(0.5, 1.1)):
        rep = check_reduction(build_color_hecke(f, b, q), b, f, q)
        assert rep.residual < 1e-9
        assert reduction_residual(eps, grades, q) < 1e-9


def test_reduction_even_multiparameter():
    f, b = multiparameter()
    rep = check_reduction(build_color_hecke(f, b, 1.3), b, f, 1.3)
    assert rep.passed and rep.even
    js = rep.to_json()
    assert js["gamma0_is_gamma"] is True and js["sigma_gauge"] == "upper-generator"


def test_reduction_super_sigma_trivial():
    f = factor_supercommutation()
    b = GradedBasis(GradingGroup((2,)), ((0,), (1,), (1,)))
    for mode in ("split", "cocycle", "literal"):
        rep = check_reduction(build_color_hecke(f, b, 1.7), b, f, 1.7, mode=mode)
        assert rep.residual < 1e-12


def test_reduction_rejects_literal_variant():
    f = factor_supercommutation()
    b = GradedBasis(GradingGroup((2,)), ((1,), (0,)))
    with pytest.raises(InvalidInputError, match="literal"):
        check_reduction(build_color_hecke(f, b, 2.0, "literal"), b, f, 2.0)


def test_unknown_mode():
    f, b = z2z2_factor(), z2z2_basis()
    with pytest.raises(InvalidInputError):
        check_reduction(build_color_hecke(f, b, 1.3), b, f, 1.3, mode="nope")


def test_superization_map_is_bijective():
    # lifts e_i (x) e_j -> (e~_i rho_a)(e~_j rho_b) hit distinct basis vectors
    b = GradedBasis(Z2Z2, ((1, 0), (0, 1), (1, 1), (1, 0)))
    used = b.grades_in_use()
    lifts = {(i, used.index(b.grade(i)), j, used.index(b.grade(j))) for i in b.labels for j in b.labels}
    assert len(lifts) == b.dim**2
