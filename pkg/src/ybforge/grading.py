"""Finitely generated abelian grading groups and commutation factors.

A grading group is ``Z^a + Z_{m_1} + ...`` described by a list of moduli
(0 marks an infinite cyclic summand).  Group elements are plain integer
tuples, reduced coordinatewise.  A commutation factor is a bicharacter
``eps`` with ``eps(a, b) * eps(b, a) == 1``; it is stored through its values
on pairs of generators and extended bimultiplicatively.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Sequence, Tuple

from .errors import InvalidInputError, NumericalError

GroupElement = Tuple[int, ...]

DEFAULT_TOL = 1e-9
MAX_EXPONENT = 10**6


@dataclass(frozen=True)
class GradingGroup:
    moduli: Tuple[int, ...]

    def __post_init__(self):
        moduli = tuple(int(m) for m in self.moduli)
        if not moduli:
            raise InvalidInputError("grading group needs at least one generator")
        for m in moduli:
            if m < 0 or m == 1:
                raise InvalidInputError(f"modulus must be 0 or >= 2, got {m}")
        object.__setattr__(self, "moduli", moduli)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def is_finite(self) -> bool:
        return all(m > 0 for m in self.moduli)

    def element(self, coords: Sequence[int]) -> GroupElement:
        """Reduce ``coords`` to the canonical representative."""
        if len(coords) != self.rank:
            raise InvalidInputError(
                f"element {tuple(coords)} has length {len(coords)}, group rank is {self.rank}"
            )
        out = []
        for c, m in zip(coords, self.moduli):
            if int(c) != c:
                raise InvalidInputError(f"non-integer coordinate {c!r}")
            c = int(c)
            if m:
                c %= m
            elif abs(c) > MAX_EXPONENT:
                raise InvalidInputError(f"coordinate {c} exceeds the {MAX_EXPONENT} bound")
            out.append(c)
        return tuple(out)

    def zero(self) -> GroupElement:
        return (0,) * self.rank

    def generator(self, i: int) -> GroupElement:
        return self.element([1 if j == i else 0 for j in range(self.rank)])

    def add(self, a: GroupElement, b: GroupElement) -> GroupElement:
        a, b = self.element(a), self.element(b)
        return self.element([x + y for x, y in zip(a, b)])

    def neg(self, a: GroupElement) -> GroupElement:
        return self.element([-x for x in self.element(a)])

    def elements(self):
        """Enumerate a finite group (raises for infinite ones)."""
        if not self.is_finite:
            raise InvalidInputError("cannot enumerate a group with infinite summands")
        from itertools import product

        return [tuple(c) for c in product(*(range(m) for m in self.moduli))]


def add(group: GradingGroup, a: GroupElement, b: GroupElement) -> GroupElement:
    return group.add(a, b)


def _close(x: complex, y: complex, tol: float) -> bool:
    return abs(x - y) <= tol


@dataclass(frozen=True)
class CommutationFactor:
    """Bicharacter on ``group`` given by ``gen_values[i][j] = eps(xi_i, xi_j)``."""

    group: GradingGroup
    gen_values: Tuple[Tuple[complex, ...], ...]
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        k = self.group.rank
        rows = tuple(tuple(complex(v) for v in row) for row in self.gen_values)
        if len(rows) != k or any(len(r) != k for r in rows):
            raise InvalidInputError(f"generator matrix must be {k}x{k}")
        object.__setattr__(self, "gen_values", rows)
        for i in range(k):
            for j in range(k):
                v = rows[i][j]
                if v == 0:
                    raise InvalidInputError(f"eps(xi_{i}, xi_{j}) is zero")
                if not _close(v * rows[j][i], 1.0, self.tol):
                    raise InvalidInputError(
                        f"antisymmetry fails for generators ({i}, {j}): "
                        f"{v} * {rows[j][i]} != 1"
                    )
            d = rows[i][i]
            if not (_close(d, 1.0, self.tol) or _close(d, -1.0, self.tol)):
                raise InvalidInputError(f"eps(xi_{i}, xi_{i}) = {d} is not +-1")
        for i, m in enumerate(self.group.moduli):
            if not m:
                continue
            for j in range(k):
                for v, pair in ((rows[i][j], (i, j)), (rows[j][i], (j, i))):
                    if not _close(v**m, 1.0, self.tol * max(1, m)):
                        raise InvalidInputError(
                            f"torsion incompatibility at generator pair {pair}: "
                            f"value {v} raised to modulus {m} is not 1"
                        )

    def __call__(self, a: GroupElement, b: GroupElement) -> complex:
        return eval_factor(self, a, b)

    @property
    def diagonal(self) -> Tuple[complex, ...]:
        return tuple(self.gen_values[i][i] for i in range(self.group.rank))


def bimultiplicative(gen_values, group: GradingGroup, a: GroupElement, b: GroupElement) -> complex:
    a, b = group.element(a), group.element(b)
    out = 1 + 0j
    for i, ai in enumerate(a):
        if not ai:
            continue
        row = gen_values[i]
        for j, bj in enumerate(b):
            e = ai * bj
            if e:
                out *= row[j] ** e
    return out


def eval_factor(f: CommutationFactor, a: GroupElement, b: GroupElement) -> complex:
    return bimultiplicative(f.gen_values, f.group, a, b)


def parity(f: CommutationFactor, a: GroupElement) -> int:
    v = eval_factor(f, a, a)
    if _close(v, 1.0, f.tol):
        return 0
    if _close(v, -1.0, f.tol):
        return 1
    raise NumericalError(f"eps({a}, {a}) = {v} is not +-1; factor is broken")


def is_even_factor(f: CommutationFactor) -> bool:
    return all(_close(d, 1.0, f.tol) for d in f.diagonal)


def _square(m, name: str) -> list[list[int]]:
    rows = [list(r) for r in m]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise InvalidInputError(f"{name} must be square")
    for r in rows:
        for v in r:
            if int(v) != v:
                raise InvalidInputError(f"{name} must be integer valued")
            if abs(v) > MAX_EXPONENT:
                raise InvalidInputError(f"{name} entry {v} exceeds the {MAX_EXPONENT} bound")
    return [[int(v) for v in r] for r in rows]


def factor_from_exponents(group: GradingGroup, s, a, z: complex, tol: float = DEFAULT_TOL) -> CommutationFactor:
    """eps_ij = (-1)^{s_ij} z^{a_ij} with s symmetric and a antisymmetric."""
    s = _square(s, "s")
    a = _square(a, "a")
    k = group.rank
    if len(s) != k or len(a) != k:
        raise InvalidInputError(f"exponent matrices must be {k}x{k}")
    z = complex(z)
    if z == 0:
        raise InvalidInputError("z must be nonzero")
    for i in range(k):
        for j in range(k):
            if s[i][j] != s[j][i]:
                raise InvalidInputError(f"s is not symmetric at ({i}, {j})")
            if a[i][j] != -a[j][i]:
                raise InvalidInputError(f"a is not antisymmetric at ({i}, {j})")
    gen = [[(-1) ** (s[i][j] % 2) * z ** a[i][j] for j in range(k)] for i in range(k)]
    return CommutationFactor(group, gen, tol)


def factor_from_omega(group: GradingGroup, omega, N: int, tol: float = DEFAULT_TOL) -> CommutationFactor:
    """eps_ij = exp(2 pi i Omega_ij / N) on (Z_N)^k."""
    omega = _square(omega, "omega")
    k = group.rank
    if int(N) != N or N <= 2:
        raise InvalidInputError(f"N must be an integer > 2, got {N}")
    if any(m != N for m in group.moduli):
        raise InvalidInputError(f"all moduli must equal N={N}, got {group.moduli}")
    if len(omega) != k:
        raise InvalidInputError(f"omega must be {k}x{k}")
    for i in range(k):
        for j in range(k):
            if omega[i][j] != -omega[j][i]:
                raise InvalidInputError(f"omega is not antisymmetric at ({i}, {j})")
    gen = [[cmath.exp(2j * cmath.pi * omega[i][j] / N) for j in range(k)] for i in range(k)]
    return CommutationFactor(group, gen, tol)


def factor_supercommutation() -> CommutationFactor:
    return CommutationFactor(GradingGroup((2,)), [[-1]])


def factor_trivial(group: GradingGroup) -> CommutationFactor:
    k = group.rank
    return CommutationFactor(group, [[1] * k for _ in range(k)])


def sample_elements(group: GradingGroup, rng, n: int, span: int = 6) -> list[GroupElement]:
    """Random elements; infinite coordinates are drawn from ``[-span, span]``."""
    return [
        group.element([rng.randrange(m) if m else rng.randint(-span, span) for m in group.moduli])
        for _ in range(n)
    ]


def rel_err(x: complex, y: complex) -> float:
    """``|x - y|`` relative to ``max(1, |y|)``; factor values over Z can be huge."""
    return abs(x - y) / max(1.0, abs(y))


@dataclass
class AxiomReport:
    samples: int
    residuals: dict

    def passed(self, tol: float) -> bool:
        return all(r <= tol for r in self.residuals.values())

    def to_json(self, tol: float) -> dict:
        return {"check": "factor", "samples": self.samples, "residuals": dict(self.residuals), "pass": self.passed(tol)}


def check_factor_axioms(f: CommutationFactor, samples: int = 200, seed: int = 0) -> AxiomReport:
    """Sampled relative residuals of antisymmetry, bimultiplicativity (both
    slots), the parity homomorphism and invariance under shifts by a modulus."""
    import random

    rng = random.Random(seed)
    g = f.group
    xs, ys, zs = (sample_elements(g, rng, samples) for _ in range(3))
    anti = bim = par = tors = 0.0
    for a, b, c in zip(xs, ys, zs):
        anti = max(anti, rel_err(f(a, b) * f(b, a), 1))
        bim = max(bim, rel_err(f(g.add(a, b), c), f(a, c) * f(b, c)))
        bim = max(bim, rel_err(f(a, g.add(b, c)), f(a, b) * f(a, c)))
        par = max(par, float(parity(f, g.add(a, b)) != parity(f, a) ^ parity(f, b)))
        for i, m in enumerate(g.moduli):
            if m:
                shifted = list(a)
                shifted[i] += m
                tors = max(tors, rel_err(bimultiplicative_raw(f.gen_values, shifted, b), f(a, b)))
    return AxiomReport(
        samples,
        {"antisymmetry": anti, "bimultiplicativity": bim, "parity_homomorphism": par, "torsion": tors},
    )


def bimultiplicative_raw(gen_values, a: Sequence[int], b: Sequence[int]) -> complex:
    """Bimultiplicative extension on unreduced coordinates."""
    out = 1 + 0j
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            if ai * bj:
                out *= gen_values[i][j] ** (ai * bj)
    return out
