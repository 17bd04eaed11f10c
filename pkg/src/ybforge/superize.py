"""Reduction of a color Hecke braiding to a super R-matrix times a color swap.

A factor ``eps`` splits as ``eps(a, b) = (-1)^{pi(a) pi(b)} dhat(a, b)`` where
``dhat`` is an alternating bicharacter, and ``dhat = sigma / sigma^T`` for the
bicharacter ``sigma`` built by ``compute_cocycle``.  Each basis vector
``e_i`` of grade ``a`` is mapped to ``e~_i (x) rho_a``: ``e~_i`` carries the
Z_2 grade ``pi(a)`` and ``rho_a`` spans a one-dimensional copy of grade ``a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Literal, Tuple

from .braiding import build_color_hecke, build_super_r
from .errors import InvalidInputError
from .grading import (
    CommutationFactor,
    GradingGroup,
    GroupElement,
    bimultiplicative,
    eval_factor,
    is_even_factor,
    parity,
)
from .linop import GradedBasis, TensorOperator, op_distance

ReductionMode = Literal["split", "cocycle", "literal"]
REDUCTION_MODES = ("split", "cocycle", "literal")
SIGMA_GAUGE = "upper-generator"


@dataclass(frozen=True)
class Z2Regrading:
    basis: GradedBasis
    deltas: Tuple[int, ...]  # deltas[i - 1] = pi(p(i))

    @property
    def z2_basis(self) -> GradedBasis:
        return GradedBasis(GradingGroup((2,)), tuple((d,) for d in self.deltas))

    @property
    def even_labels(self) -> list[int]:
        return [i for i, d in zip(self.basis.labels, self.deltas) if d == 0]

    @property
    def odd_labels(self) -> list[int]:
        return [i for i, d in zip(self.basis.labels, self.deltas) if d == 1]


def z2_regrade(basis: GradedBasis, f: CommutationFactor) -> Z2Regrading:
    return Z2Regrading(basis, tuple(parity(f, g) for g in basis.grades))


def delta_hat(f: CommutationFactor, a: GroupElement, b: GroupElement) -> complex:
    """``eps(a, b) (-1)^{pi(a) pi(b)}``; equals 1 on the diagonal."""
    sign = -1 if parity(f, a) and parity(f, b) else 1
    return sign * eval_factor(f, a, b)


@dataclass(frozen=True)
class CocycleSigma:
    group: GradingGroup
    gen_sigma: Tuple[Tuple[complex, ...], ...]
    gauge: str = SIGMA_GAUGE

    def __call__(self, a: GroupElement, b: GroupElement) -> complex:
        return bimultiplicative(self.gen_sigma, self.group, a, b)


def compute_cocycle(f: CommutationFactor) -> CocycleSigma:
    g = f.group
    k = g.rank
    gens = [g.generator(i) for i in range(k)]
    gen = tuple(
        tuple(delta_hat(f, gens[i], gens[j]) if i < j else 1 + 0j for j in range(k)) for i in range(k)
    )
    for i, m in enumerate(g.moduli):
        if not m:
            continue
        for j in range(k):
            for v in (gen[i][j], gen[j][i]):
                if abs(v**m - 1) > f.tol * m:
                    raise InvalidInputError(f"cocycle value {v} not compatible with modulus {m}")
    return CocycleSigma(g, gen)


def build_rdelta(f: CommutationFactor, grades_in_use) -> TensorOperator:
    """Color swap with factor ``dhat`` on the span of ``rho_a`` (labels follow list order)."""
    grades = [f.group.element(a) for a in grades_in_use]
    if len(set(grades)) != len(grades):
        raise InvalidInputError("grades_in_use must be distinct")
    n = len(grades)
    entries = {}
    for x in range(n):
        for y in range(n):
            entries[(x + 1, y + 1)] = {(y + 1, x + 1): delta_hat(f, grades[x], grades[y])}
    return TensorOperator(n, 2, entries)


@dataclass
class ReductionReport:
    mode: str
    tol: float
    even: bool
    blocks: Dict[Tuple[GroupElement, GroupElement], float] = field(default_factory=dict)

    @property
    def residual(self) -> float:
        return max(self.blocks.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.blocks.values())

    def to_json(self) -> dict:
        return {
            "check": "reduction",
            "mode": self.mode,
            "sigma_gauge": SIGMA_GAUGE,
            "gamma0_is_gamma": self.even,
            "blocks": [
                {"src": [list(a), list(b)], "residual": r} for (a, b), r in sorted(self.blocks.items())
            ],
            "residual": self.residual,
            "pass": self.passed,
        }


# A vector in (E~ (x) E')^{(x)2}: keys ((i, rho), (j, rho')).
_Vec = Dict[Tuple[Tuple[int, int], Tuple[int, int]], complex]


def _acc(vec: _Vec, key, c: complex):
    vec[key] = vec.get(key, 0) + c


def check_reduction(
    R: TensorOperator,
    basis: GradedBasis,
    f: CommutationFactor,
    q: complex,
    tol: float = 1e-9,
    mode: ReductionMode = "split",
) -> ReductionReport:
    """Compare ``S o R`` with ``(Rbar ^(x) R_delta) o S`` on every ``e_i (x) e_j``.

    ``S`` sends ``e_i (x) e_j`` to ``tw(a, b) (e~_i (x) rho_a) (x) (e~_j (x) rho_b)``.
    Modes:

    ``split``   -- ``tw = 1``, ``R_delta`` swaps with ``dhat``.
    ``cocycle`` -- ``tw = sigma``, ``R_delta`` is the plain flip.
    ``literal`` -- ``tw = sigma`` and ``R_delta`` swaps with ``dhat``.

    ``^(x)`` conjugates ``Rbar (x) R_delta`` by the leg permutation
    ``(e~ rho)(e~' rho') -> (e~ e~')(rho rho')``; on each output term the
    ``E'`` legs follow the ``E~`` legs, i.e. ``R_delta`` acts where ``Rbar``
    exchanges the factors and the identity acts on the diagonal
    ``(q - 1/q)`` term.
    """
    if mode not in REDUCTION_MODES:
        raise InvalidInputError(f"unknown reduction mode {mode!r}")
    if R.dim != basis.dim or R.arity != 2:
        raise InvalidInputError("operator does not act on basis (x) basis")
    even = is_even_factor(f)
    if not even:
        d_uniform = op_distance(R, build_color_hecke(f, basis, q, "uniform"))
        d_literal = op_distance(R, build_color_hecke(f, basis, q, "literal"))
        if d_uniform > tol and d_literal <= tol:
            raise InvalidInputError("reduction targets the uniform variant; operator is the literal one")

    regrading = z2_regrade(basis, f)
    rbar = build_super_r(regrading.z2_basis, q)
    used = basis.grades_in_use()
    rho = {g: n + 1 for n, g in enumerate(used)}
    if mode == "cocycle":
        rdelta = TensorOperator(
            len(used), 2, {(x, y): {(y, x): 1} for x in rho.values() for y in rho.values()}
        )
    else:
        rdelta = build_rdelta(f, used)
    if mode == "split":
        twist = lambda a, b: 1.0
    else:
        twist = compute_cocycle(f)

    def lift(i: int) -> Tuple[int, int]:
        return (i, rho[basis.grade(i)])

    report = ReductionReport(mode, tol, even)
    for i in basis.labels:
        for j in basis.labels:
            a, b = basis.grade(i), basis.grade(j)
            lhs: _Vec = {}
            for (k, l), c in R.column((i, j)).items():
                _acc(lhs, (lift(k), lift(l)), c * twist(basis.grade(k), basis.grade(l)))

            rhs: _Vec = {}
            t0 = twist(a, b)
            ra, rb = rho[a], rho[b]
            for (k, l), c in rbar.column((i, j)).items():
                if (k, l) == (j, i):
                    for (rc, rd), cd in rdelta.column((ra, rb)).items():
                        _acc(rhs, ((k, rc), (l, rd)), t0 * c * cd)
                elif (k, l) == (i, j):
                    _acc(rhs, ((k, ra), (l, rb)), t0 * c)
                else:
                    raise InvalidInputError("super R-matrix is not exchange shaped")

            diff = max((abs(lhs.get(key, 0) - rhs.get(key, 0)) for key in set(lhs) | set(rhs)), default=0.0)
            key = (a, b)
            report.blocks[key] = max(report.blocks.get(key, 0.0), diff)
    return report


def check_cocycle(f: CommutationFactor, samples: int = 200, seed: int = 0) -> dict:
    """Sampled relative residuals of ``sigma/sigma^T = dhat``, ``dhat(a, a) = 1`` and the
    sign recomposition ``eps = (-1)^{pi pi} dhat``."""
    import random

    from .grading import rel_err, sample_elements

    rng = random.Random(seed)
    sigma = compute_cocycle(f)
    xs = sample_elements(f.group, rng, samples)
    ys = sample_elements(f.group, rng, samples)
    ratio = diag = recomp = 0.0
    for a, b in zip(xs, ys):
        dh = delta_hat(f, a, b)
        ratio = max(ratio, rel_err(sigma(a, b) / sigma(b, a), dh))
        diag = max(diag, abs(delta_hat(f, a, a) - 1))
        sign = -1 if parity(f, a) and parity(f, b) else 1
        recomp = max(recomp, rel_err(f(a, b), sign * dh))
    return {"sigma_ratio": ratio, "dhat_alternating": diag, "recomposition": recomp}
