"""Color R-matrices and their verification.

``build_color_hecke`` acts on ``e_i (x) e_j`` (``a = p(i)``, ``b = p(j)``) by

* ``i == j``: ``q^(1 - 2 pi(a)) eps(a, a) e_i (x) e_i``
* ``i < j``:  ``c e_i (x) e_j + eps(a, b) e_j (x) e_i``
* ``i > j``:  ``eps(a, b) e_j (x) e_i``

where ``c = q - 1/q`` for the ``uniform`` variant and ``eps(a, a) (q - 1/q)``
for the ``literal`` one.  The two coincide on even factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .errors import InvalidInputError
from .grading import (
    CommutationFactor,
    GradingGroup,
    eval_factor,
    factor_from_exponents,
    factor_from_omega,
    factor_supercommutation,
    parity,
)
from .linop import GradedBasis, Index, TensorOperator, column_distances, place_on_legs

HeckeVariant = Literal["uniform", "literal"]
VARIANTS = ("uniform", "literal")


def _check_basis(f: CommutationFactor, basis: GradedBasis):
    if basis.group != f.group:
        raise InvalidInputError(f"basis group {basis.group.moduli} != factor group {f.group.moduli}")


def build_color_swap(f: CommutationFactor, basis: GradedBasis) -> TensorOperator:
    _check_basis(f, basis)
    entries = {}
    for i in basis.labels:
        for j in basis.labels:
            entries[(i, j)] = {(j, i): eval_factor(f, basis.grade(i), basis.grade(j))}
    return TensorOperator(basis.dim, 2, entries)


def build_color_hecke(
    f: CommutationFactor,
    basis: GradedBasis,
    q: complex,
    variant: HeckeVariant = "uniform",
    *,
    triangular: Optional[complex] = None,
) -> TensorOperator:
    """Color Hecke R-matrix on ``basis``.

    ``triangular`` overrides ``q - 1/q`` in the ``i < j`` term (kept for
    negative controls such as ``q + 1/q``).
    """
    _check_basis(f, basis)
    q = complex(q)
    if q == 0:
        raise InvalidInputError("q must be nonzero")
    if variant not in VARIANTS:
        raise InvalidInputError(f"unknown variant {variant!r}")
    kappa = q - 1 / q if triangular is None else complex(triangular)
    entries = {}
    for i in basis.labels:
        a = basis.grade(i)
        pa = parity(f, a)
        eps_aa = -1 if pa else 1  # exact sign; eps(a, a) is +-1 up to rounding
        for j in basis.labels:
            b = basis.grade(j)
            if i == j:
                entries[(i, i)] = {(i, i): q ** (1 - 2 * pa) * eps_aa}
                continue
            col = {(j, i): eval_factor(f, a, b)}
            if i < j:
                col[(i, j)] = kappa * eps_aa if variant == "literal" else kappa
            entries[(i, j)] = col
    return TensorOperator(basis.dim, 2, entries)


def build_multiparameter(a, z: complex, q: complex, variant: HeckeVariant = "uniform") -> TensorOperator:
    """Multiparameter R-matrix: ``Z^k`` standard gradation, ``eps_ij = z^{a_ij}``."""
    k = len(a)
    group = GradingGroup((0,) * k)
    f = factor_from_exponents(group, [[0] * k for _ in range(k)], a, z)
    return build_color_hecke(f, GradedBasis.standard(group), q, variant)


def build_anyonic(omega, N: int, q: complex, variant: HeckeVariant = "uniform") -> TensorOperator:
    """Anyonic deformation: ``(Z_N)^k`` standard gradation, ``eps_ij = exp(2 pi i Omega_ij / N)``."""
    k = len(omega)
    group = GradingGroup((N,) * k)
    f = factor_from_omega(group, omega, N)
    return build_color_hecke(f, GradedBasis.standard(group), q, variant)


def build_super_r(z2_basis: GradedBasis, q: complex) -> TensorOperator:
    if z2_basis.group.moduli != (2,):
        raise InvalidInputError(f"super R-matrix needs a Z_2 grading, got {z2_basis.group.moduli}")
    return build_color_hecke(factor_supercommutation(), z2_basis, q, "uniform")


@dataclass
class QybeReport:
    residual: float
    worst_input: Optional[Index]
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol

    def to_json(self) -> dict:
        return {
            "check": "qybe",
            "residual": self.residual,
            "pass": self.passed,
            "worst_input": list(self.worst_input) if self.worst_input else None,
        }


def braid_sides(R: TensorOperator) -> tuple[TensorOperator, TensorOperator]:
    r12 = place_on_legs(R, 3, 1)
    r23 = place_on_legs(R, 3, 2)
    return r12 @ r23 @ r12, r23 @ r12 @ r23


def check_qybe(R: TensorOperator, tol: float = 1e-9) -> QybeReport:
    if R.arity != 2:
        raise InvalidInputError("check_qybe expects an arity-2 operator")
    lhs, rhs = braid_sides(R)
    dist = column_distances(lhs, rhs)
    if not dist:
        return QybeReport(0.0, None, tol)
    worst = max(sorted(dist), key=lambda s: dist[s])
    if dist[worst] == 0:
        return QybeReport(0.0, None, tol)
    return QybeReport(dist[worst], worst, tol)


@dataclass
class HeckeSubspace:
    indices: tuple[int, ...]
    sign: Optional[int]
    residual: float


@dataclass
class HeckeReport:
    subspaces: list[HeckeSubspace] = field(default_factory=list)
    exchange_shaped: bool = True

    @property
    def passed(self) -> bool:
        """True iff ``R^2 = id + (q - 1/q) R`` holds on every subspace."""
        return self.exchange_shaped and all(s.sign == 1 for s in self.subspaces)

    def signs(self) -> dict[tuple[int, ...], Optional[int]]:
        return {s.indices: s.sign for s in self.subspaces}

    def to_json(self) -> dict:
        return {
            "check": "hecke",
            "exchange_shaped": self.exchange_shaped,
            "subspaces": [
                {"indices": list(s.indices), "sign": s.sign, "residual": s.residual}
                for s in self.subspaces
            ],
            "pass": self.passed,
        }


def _exchange_subspaces(dim: int):
    for i in range(1, dim + 1):
        yield (i,)
    for i in range(1, dim + 1):
        for j in range(i + 1, dim + 1):
            yield (i, j)


def _subspace_basis(ind: tuple[int, ...]) -> list[Index]:
    if len(ind) == 1:
        return [(ind[0], ind[0])]
    i, j = ind
    return [(i, j), (j, i)]


def check_hecke(R: TensorOperator, basis: GradedBasis, q: complex, tol: float = 1e-9) -> HeckeReport:
    """Test ``M^2 = id + s (q - 1/q) M`` with ``s = +-1`` on each exchange subspace."""
    if basis.dim != R.dim:
        raise InvalidInputError(f"basis dim {basis.dim} != operator dim {R.dim}")
    q = complex(q)
    kappa = q - 1 / q
    report = HeckeReport()
    for ind in _exchange_subspaces(R.dim):
        vecs = _subspace_basis(ind)
        m = np.zeros((len(vecs), len(vecs)), dtype=complex)
        for c, src in enumerate(vecs):
            for dst, v in R.column(src).items():
                if dst not in vecs:
                    report.exchange_shaped = False
                    report.subspaces = []
                    return report
                m[vecs.index(dst), c] = v
        eye = np.eye(len(vecs))
        m2 = m @ m
        res = {s: float(np.max(np.abs(m2 - eye - s * kappa * m))) for s in (1, -1)}
        best = min((1, -1), key=lambda s: res[s])
        sign = best if res[best] <= tol else None
        report.subspaces.append(HeckeSubspace(ind, sign, res[best]))
    return report
