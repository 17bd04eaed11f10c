import cmath
import itertools
import random

import numpy as np
import pytest

from ybforge.braiding import build_color_hecke
from ybforge.calculus import (
    CONDITIONS,
    build_bcf,
    check_consistency,
    check_emitted_against_display,
    emit_relations,
    rewrite_normal,
)
from ybforge.errors import NumericalError
from ybforge.grading import GradingGroup, factor_from_exponents, factor_supercommutation, factor_trivial
from ybforge.linop import GradedBasis, TensorOperator, identity_op, op_distance

G0 = GradingGroup((0,))


def ungraded(dim, q):
    f = factor_trivial(G0)
    b = GradedBasis(G0, ((0,),) * dim)
    return build_bcf(build_color_hecke(f, b, q), b, f, q)


def gl11(q):
    f = factor_supercommutation()
    b = GradedBasis(GradingGroup((2,)), ((0,), (1,)))
    return build_bcf(build_color_hecke(f, b, q), b, f, q)


def multiparameter(z, q, a=((0, 1), (-1, 0))):
    k = len(a)
    g = GradingGroup((0,) * k)
    f = factor_from_exponents(g, [[0] * k for _ in range(k)], a, z)
    b = GradedBasis.standard(g)
    return build_bcf(build_color_hecke(f, b, q), b, f, q)


def test_ungraded_scales():
    q = 1.3
    t = ungraded(2, q)
    R = build_color_hecke(factor_trivial(G0), GradedBasis(G0, ((0,),) * 2), q)
    assert op_distance(t.B, (1 / q) * R) < 1e-15
    assert op_distance(t.C, q * R) < 1e-15
    assert op_distance(t.F, t.B) == 0


def test_gl11_block_scales():
    q = 2.0
    t = gl11(q)
    # x (x) theta: B scale 1/q on R = (q - 1/q, 1); theta (x) x: B scale q on R = 1
    assert t.B.column((1, 2)) == pytest.approx({(1, 2): (q - 1 / q) / q, (2, 1): 1 / q})
    assert t.B.column((2, 1)) == pytest.approx({(1, 2): q})


@pytest.mark.parametrize("make", [lambda: ungraded(3, 1.7), lambda: gl11(1.3), lambda: multiparameter(0.9, 1.2)])
def test_c_inverse(make):
    t = make()
    assert op_distance(t.C @ t.C_inv, identity_op(t.C.dim, 2)) < 1e-12


def test_singular_c_raises():
    b = GradedBasis(G0, ((0,),) * 2)
    R = TensorOperator(2, 2, {(1, 1): {(1, 1): 1}})
    with pytest.raises(NumericalError, match="det"):
        build_bcf(R, b, factor_trivial(G0), 1.5)


@pytest.mark.parametrize("dim", [2, 3])
def test_ungraded_consistency(dim):
    rep = check_consistency(ungraded(dim, 1.7))
    assert [c.name for c in rep.conditions] == list(CONDITIONS)
    assert rep.passed
    assert max(c.residual for c in rep.conditions) < 1e-9


def test_even_random_consistency():
    rng = random.Random(7)
    for _ in range(20):
        k = rng.randint(1, 3)
        a = [[0] * k for _ in range(k)]
        for i, j in itertools.combinations(range(k), 2):
            a[i][j] = rng.randint(-2, 2)
            a[j][i] = -a[i][j]
        z = cmath.exp(1j * rng.uniform(0, 6.28)) if rng.random() < 0.5 else rng.uniform(0.5, 2)
        q = rng.uniform(0.5, 2)
        rep = check_consistency(multiparameter(z, q, a))
        assert rep.passed, rep.to_json()


def test_gl11_odd_diagonal_block():
    q = 1.3
    rep = check_consistency(gl11(q))
    blocks = rep.condition("hecke_BC").blocks
    assert blocks[((1,), (1,))] == pytest.approx(2 * (1 - q**-2))
    js = rep.to_json()
    flags = {tuple(map(tuple, b["src"])): b["odd_diagonal"] for b in js["conditions"][0]["blocks"]}
    assert flags[((1,), (1,))] and not flags[((0,), (0,))]
    assert not rep.passed


def test_ungraded_relations():
    q = 1.3
    rs = emit_relations(ungraded(2, q))
    assert rs.plane_rule((1, 2)).rhs == [((2, 1), pytest.approx(q))]
    d11 = dict(rs.dx_rule(1, 1).terms)
    assert rs.dx_rule(1, 1).const == 1
    assert d11 == pytest.approx({(1, 1): q**2, (2, 2): q**2 - 1})
    d12 = rs.dx_rule(1, 2)
    assert d12.const == 0 and dict(d12.terms) == pytest.approx({(2, 1): q})
    assert rs.nilpotent == [] and rs.warnings == []
    text = rs.to_text()
    assert "x1 x2 = 1.3 x2 x1" in text


def test_ungraded_display_lines():
    rs = emit_relations(ungraded(3, 1.7))
    disp = check_emitted_against_display(rs, factor_trivial(G0), 1.7)
    assert disp.passed


def test_multiparameter_display_off_diagonal_carries_eps():
    z, q = 0.8, 1.3
    t = multiparameter(z, q)
    rs = emit_relations(t)
    disp = check_emitted_against_display(rs, t.factor, q)
    for line in ("plane", "nilpotent", "dx_diag"):
        assert disp.residual(line) < 1e-12
    assert rs.plane_rule((1, 2)).rhs[0][1] == pytest.approx(q * z)
    assert dict(rs.dx_rule(1, 2).terms)[(2, 1)] == pytest.approx(q / z)
    assert disp.residual("dx_off") > 0.1


def test_gl11_relations():
    rs = emit_relations(gl11(2.0))
    assert rs.nilpotent == [2]
    assert rs.plane_raw and rs.warnings


def test_plane_relations_lie_in_image():
    for t in (ungraded(3, 1.4), multiparameter(complex(0.6, 0.8), 0.9)):
        rs = emit_relations(t)
        n = t.B.dim
        gens = (np.eye(n * n) - t.B.to_dense()).T  # columns of (E - B)
        for rel in rs.plane:
            v = np.zeros(n * n, dtype=complex)
            v[(rel.lhs[0] - 1) * n + rel.lhs[1] - 1] += 1
            for (k, l), c in rel.rhs:
                v[(k - 1) * n + l - 1] -= c
            coef, *_ = np.linalg.lstsq(gens.T, v, rcond=None)
            assert np.max(np.abs(gens.T @ coef - v)) < 1e-10


def test_dx_rules_preserve_plane_ideal():
    # the constant part of d_i applied to any (E - B) generator must vanish
    for t in (ungraded(3, 1.4), multiparameter(complex(0.6, 0.8), 0.9)):
        rs = emit_relations(t)
        n = t.B.dim
        for src in itertools.product(range(1, n + 1), repeat=2):
            g = {src: 1 + 0j}
            for dst, c in t.B.column(src).items():
                g[dst] = g.get(dst, 0) - c
            for i in range(1, n + 1):
                lin = np.zeros(n, dtype=complex)
                for (k, l), c in g.items():
                    if i == k:
                        lin[l - 1] += c
                    for (m, d), v in rs.dx_rule(i, k).terms:
                        if d == l:
                            lin[m - 1] += c * v
                assert np.max(np.abs(lin)) < 1e-12


def test_diamond_normal_form():
    rs = emit_relations(multiparameter(complex(0.6, 0.8), 1.3, a=((0, 1, 2), (-1, 0, 1), (-2, -1, 0))))
    for word in itertools.permutations((1, 2, 3)):
        a = rewrite_normal({word: 1}, rs)
        b = rewrite_normal({word: 1}, rs, rightmost=True)
        assert set(a) == {(3, 2, 1)}
        assert a[(3, 2, 1)] == pytest.approx(b[(3, 2, 1)])


def test_nilpotent_words_vanish():
    rs = emit_relations(gl11(2.0))
    assert rewrite_normal({(2, 2): 1, (1, 1): 2}, rs) == {(1, 1): 2}
