"""First-order differential calculus on color quantum (super-)planes.

Conventions (operators are stored as ``M[out, in]``):

* plane:       ``x_i x_j = sum B[(k,l), (i,j)] x_k x_l``
* differential ``x_i dx_j = sum C[(k,l), (i,j)] dx_k x_l``
* derivatives  ``d_i d_j = sum F[(j,i), (l,k)] d_k d_l``
* mixed        ``d_i x_j = delta_ij + sum C[(i,l), (j,k)] x_l d_k``

which is the transpose of the row-indexed Wess-Zumino layout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .braiding import braid_sides
from .errors import InvalidInputError, NumericalError
from .grading import CommutationFactor, GroupElement, eval_factor, parity
from .linop import (
    GradedBasis,
    Index,
    TensorOperator,
    column_distances,
    identity_op,
    place_on_legs,
    source_grades,
)

PRUNE_TOL = 1e-12


@dataclass(frozen=True)
class CalculusTriple:
    B: TensorOperator
    C: TensorOperator
    F: TensorOperator
    C_inv: TensorOperator
    basis: GradedBasis
    factor: CommutationFactor
    q: complex


def build_bcf(R: TensorOperator, basis: GradedBasis, f: CommutationFactor, q: complex) -> CalculusTriple:
    """Scale each source block ``(a, b)`` of ``R``: ``B = F = q^(-1+2pi(a)) R``, ``C = q^(1-2pi(a)) R``."""
    if R.dim != basis.dim or R.arity != 2:
        raise InvalidInputError("operator does not act on basis (x) basis")
    q = complex(q)
    if q == 0:
        raise InvalidInputError("q must be nonzero")
    par = {i: parity(f, basis.grade(i)) for i in basis.labels}
    B = R.scale_columns(lambda s: q ** (-1 + 2 * par[s[0]]))
    C = R.scale_columns(lambda s: q ** (1 - 2 * par[s[0]]))
    dense = C.to_dense()
    det = abs(np.linalg.det(dense))
    if not np.isfinite(det) or np.linalg.cond(dense) > 1e12:
        raise NumericalError(f"C is singular (|det C| = {det:.3e})")
    C_inv = TensorOperator.from_dense(np.linalg.inv(dense), R.dim, 2)
    return CalculusTriple(B, C, B, C_inv, basis, f, q)


CONDITIONS = ("hecke_BC", "hecke_CF", "qybe_B", "qybe_C", "mixed_BCC", "mixed_CCF")


@dataclass
class ConditionResult:
    name: str
    residual: float
    blocks: Dict[Tuple[GroupElement, ...], float]


@dataclass
class ConsistencyReport:
    tol: float
    odd_grades: List[GroupElement]
    conditions: List[ConditionResult] = field(default_factory=list)

    def condition(self, name: str) -> ConditionResult:
        return next(c for c in self.conditions if c.name == name)

    @property
    def passed(self) -> bool:
        return all(c.residual <= self.tol for c in self.conditions)

    def _odd_diagonal(self, key) -> bool:
        return len(key) == 2 and key[0] == key[1] and key[0] in self.odd_grades

    def to_json(self) -> dict:
        return {
            "check": "consistency",
            "conditions": [
                {
                    "name": c.name,
                    "residual": c.residual,
                    "pass": c.residual <= self.tol,
                    "blocks": [
                        {"src": [list(g) for g in key], "residual": r, "odd_diagonal": self._odd_diagonal(key)}
                        for key, r in sorted(c.blocks.items())
                    ],
                }
                for c in self.conditions
            ],
            "pass": self.passed,
        }


def _blockwise(basis: GradedBasis, lhs: TensorOperator, rhs: TensorOperator) -> Dict[tuple, float]:
    out: Dict[tuple, float] = {}
    for idx in lhs.inputs():
        out.setdefault(source_grades(basis, idx), 0.0)
    for idx, d in column_distances(lhs, rhs).items():
        key = source_grades(basis, idx)
        out[key] = max(out[key], d)
    return out


def check_consistency(t: CalculusTriple, tol: float = 1e-9) -> ConsistencyReport:
    B, C, F = t.B, t.C, t.F
    E = identity_op(B.dim, 2)
    zero = TensorOperator(B.dim, 2)
    zero3 = TensorOperator(B.dim, 3)

    def legs(X, first):
        return place_on_legs(X, 3, first)

    pairs = {
        "hecke_BC": ((E - B) @ (E + C), zero),
        "hecke_CF": ((E + C) @ (E - F), zero),
        "qybe_B": braid_sides(B),
        "qybe_C": braid_sides(C),
        "mixed_BCC": (legs(B, 1) @ legs(C, 2) @ legs(C, 1), legs(C, 2) @ legs(C, 1) @ legs(B, 2)),
        "mixed_CCF": (legs(C, 1) @ legs(C, 2) @ legs(F, 1), legs(F, 2) @ legs(C, 1) @ legs(C, 2)),
    }
    odd = sorted(g for g in t.basis.grades_in_use() if parity(t.factor, g))
    report = ConsistencyReport(tol, odd)
    for name in CONDITIONS:
        lhs, rhs = pairs[name]
        if rhs is zero and lhs.arity == 3:
            rhs = zero3
        blocks = _blockwise(t.basis, lhs, rhs)
        report.conditions.append(ConditionResult(name, max(blocks.values(), default=0.0), blocks))
    return report


Mono = Tuple[int, int]
Terms = List[Tuple[Mono, complex]]


@dataclass
class Relation:
    lhs: Mono
    rhs: Terms


@dataclass
class DxRelation:
    d: int
    x: int
    const: int
    terms: Terms  # monomial (l, k) means x_l d_k


@dataclass
class RelationSet:
    basis: GradedBasis
    plane: List[Relation] = field(default_factory=list)
    plane_raw: List[Terms] = field(default_factory=list)
    nilpotent: List[int] = field(default_factory=list)
    xd: List[Relation] = field(default_factory=list)
    dd: List[Relation] = field(default_factory=list)
    dd_raw: List[Terms] = field(default_factory=list)
    dx: List[DxRelation] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def plane_rule(self, lhs: Mono) -> Optional[Relation]:
        return next((r for r in self.plane if r.lhs == tuple(lhs)), None)

    def dx_rule(self, d: int, x: int) -> DxRelation:
        return next(r for r in self.dx if (r.d, r.x) == (d, x))

    def to_json(self) -> dict:
        return {
            "plane": [_rel_json(r) for r in self.plane],
            "plane_raw": [_terms_json(g) for g in self.plane_raw],
            "nilpotent": list(self.nilpotent),
            "xd": [_rel_json(r) for r in self.xd],
            "dd": [_rel_json(r) for r in self.dd],
            "dd_raw": [_terms_json(g) for g in self.dd_raw],
            "dx": [
                {"d": r.d, "x": r.x, "const": r.const, "terms": _terms_json(r.terms, ("x", "d"))}
                for r in self.dx
            ],
            "warnings": list(self.warnings),
        }

    def to_text(self) -> str:
        lines = []
        for r in self.plane:
            lines.append(f"x{r.lhs[0]} x{r.lhs[1]} = {_render(r.rhs, 'x{} x{}')}")
        for g in self.plane_raw:
            lines.append(f"{_render(g, 'x{} x{}')} = 0")
        for i in self.nilpotent:
            lines.append(f"x{i} x{i} = 0")
        for r in self.xd:
            lines.append(f"x{r.lhs[0]} dx{r.lhs[1]} = {_render(r.rhs, 'dx{} x{}')}")
        for r in self.dd:
            lines.append(f"D{r.lhs[0]} D{r.lhs[1]} = {_render(r.rhs, 'D{} D{}')}")
        for g in self.dd_raw:
            lines.append(f"{_render(g, 'D{} D{}')} = 0")
        for r in self.dx:
            body = _render(r.terms, "x{} D{}")
            if r.const:
                body = "1" if body == "0" else f"1 + {body}"
            lines.append(f"D{r.d} x{r.x} = {body}")
        for w in self.warnings:
            lines.append(f"# warning: {w}")
        return "\n".join(lines) + "\n"


def _fmt(c: complex) -> str:
    """12 significant digits; the JSON output keeps full precision."""
    re, im = float(c.real) + 0.0, float(c.imag) + 0.0
    if abs(im) < PRUNE_TOL:
        return f"{re:.12g}"
    if abs(re) < PRUNE_TOL:
        return f"{im:.12g}j"
    return f"({re:.12g}{im:+.12g}j)"


def _render(terms: Terms, pattern: str) -> str:
    if not terms:
        return "0"
    return " + ".join(f"{_fmt(c)} {pattern.format(*m)}" for m, c in terms)


def _clean(x: float) -> float:
    return 0.0 if x == 0 else float(x)


def _terms_json(terms: Terms, keys=None) -> list:
    if keys is None:
        return [{"mono": list(m), "re": _clean(c.real), "im": _clean(c.imag)} for m, c in terms]
    return [{keys[0]: m[0], keys[1]: m[1], "re": _clean(c.real), "im": _clean(c.imag)} for m, c in terms]


def _rel_json(r: Relation) -> dict:
    return {"lhs": list(r.lhs), "rhs": _terms_json(r.rhs)}


def _prune(d: Dict[Mono, complex]) -> Terms:
    return sorted((m, complex(c)) for m, c in d.items() if abs(c) >= PRUNE_TOL)


def _solve_pair(i: int, j: int, gens: List[Dict[Mono, complex]], out_rel, out_raw, warnings, what: str):
    """Reduce generators supported on ``{(i,j), (j,i)}`` to ``m_ij = c m_ji``."""
    mons = [(i, j), (j, i)]
    rows = np.array([[g.get(m, 0) for m in mons] for g in gens], dtype=complex)
    rows = rows[np.max(np.abs(rows), axis=1) >= PRUNE_TOL] if len(rows) else rows
    if not len(rows):
        return
    sv = np.linalg.svd(rows, compute_uv=False)
    rank = int(np.sum(sv > PRUNE_TOL * max(1.0, sv[0])))
    best = rows[np.argmax(np.abs(rows[:, 0]))]
    if rank == 1 and abs(best[0]) >= PRUNE_TOL:
        out_rel.append(Relation((i, j), _prune({(j, i): -best[1] / best[0]})))
        return
    if rank == 1:
        out_rel.append(Relation((j, i), []))
        return
    warnings.append(f"{what} relations for ({i}, {j}) have rank {rank}; emitting raw generators")
    for g in gens:
        terms = _prune(g)
        if terms:
            out_raw.append(terms)


def emit_relations(t: CalculusTriple) -> RelationSet:
    basis = t.basis
    B, C, F = t.B, t.C, t.F
    rs = RelationSet(basis)
    n = basis.dim

    for i, j in itertools.combinations(range(1, n + 1), 2):
        gens = []
        for src in ((i, j), (j, i)):
            g = {src: 1 + 0j}
            for dst, v in B.column(src).items():
                g[dst] = g.get(dst, 0) - v
            gens.append(g)
        _solve_pair(i, j, gens, rs.plane, rs.plane_raw, rs.warnings, "plane")

        gens = []
        for (a, b) in ((i, j), (j, i)):
            g = {(a, b): 1 + 0j}
            for (l, k), v in _inputs_to(F, (b, a)).items():
                g[(k, l)] = g.get((k, l), 0) - v
            gens.append(g)
        _solve_pair(i, j, gens, rs.dd, rs.dd_raw, rs.warnings, "derivative")

    rs.nilpotent = [i for i in basis.labels if parity(t.factor, basis.grade(i))]

    for i in basis.labels:
        for j in basis.labels:
            rs.xd.append(Relation((i, j), _prune(C.column((i, j)))))
            terms: Dict[Mono, complex] = {}
            for l in basis.labels:
                for (jj, k), v in _inputs_to(C, None, row=(i, l)).items():
                    if jj == j:
                        terms[(l, k)] = terms.get((l, k), 0) + v
            rs.dx.append(DxRelation(i, j, int(i == j), _prune(terms)))
    return rs


def _inputs_to(A: TensorOperator, dst, row=None) -> Dict[Index, complex]:
    """All inputs ``src`` with ``A[dst, src] != 0``."""
    target = tuple(dst if row is None else row)
    out = {}
    for src in A.inputs():
        v = A.column(src).get(target)
        if v is not None:
            out[src] = v
    return out


@dataclass
class DisplayReport:
    tol: float
    lines: Dict[str, List[Tuple[str, float]]] = field(default_factory=dict)

    def residual(self, line: str) -> float:
        return max((r for _, r in self.lines.get(line, [])), default=0.0)

    @property
    def passed(self) -> bool:
        return all(self.residual(k) <= self.tol for k in self.lines)

    def to_json(self) -> dict:
        return {
            "check": "display",
            "lines": {
                k: {
                    "residual": self.residual(k),
                    "pass": self.residual(k) <= self.tol,
                    "relations": [{"relation": name, "residual": r} for name, r in v],
                }
                for k, v in self.lines.items()
            },
            "pass": self.passed,
        }


def check_emitted_against_display(rs: RelationSet, f: CommutationFactor, q: complex, tol: float = 1e-9) -> DisplayReport:
    """Compare emitted coefficients with closed forms that depend only on the grades.

    ``plane``: ``x_i x_j = q^(1-2pi(b)) eps(a, b) x_j x_i`` for ``i < j``
    ``nilpotent``: odd labels square to zero
    ``dx_diag``: ``d_i x_i = 1 + q^(2(1-pi(a))) x_i d_i + sum_{k>i} (q^(2(1-pi(a))) - 1) x_k d_k``
    ``dx_off``: ``d_i x_j = q^(1-2pi(a)) x_j d_i`` for ``i != j``
    """
    basis = rs.basis
    q = complex(q)
    par = {i: parity(f, basis.grade(i)) for i in basis.labels}
    report = DisplayReport(tol)
    plane, nil, diag, off = [], [], [], []

    for i, j in itertools.combinations(basis.labels, 2):
        want = q ** (1 - 2 * par[j]) * eval_factor(f, basis.grade(i), basis.grade(j))
        rule = rs.plane_rule((i, j))
        if rule is None or [m for m, _ in rule.rhs] != [(j, i)]:
            plane.append((f"x{i} x{j}", float("inf")))
        else:
            plane.append((f"x{i} x{j}", abs(rule.rhs[0][1] - want)))

    odd = {i for i in basis.labels if par[i]}
    nil.append(("nilpotent", 0.0 if set(rs.nilpotent) == odd else 1.0))

    for i in basis.labels:
        for j in basis.labels:
            rule = rs.dx_rule(i, j)
            got = dict(rule.terms)
            if i == j:
                s = q ** (2 * (1 - par[i]))
                want = {(i, i): s}
                want.update({(k, k): s - 1 for k in basis.labels if k > i})
                const_err = abs(rule.const - 1)
                bucket = diag
            else:
                want = {(j, i): q ** (1 - 2 * par[i])}
                const_err = abs(rule.const)
                bucket = off
            err = max([abs(got.get(m, 0) - want.get(m, 0)) for m in set(got) | set(want)] + [const_err])
            bucket.append((f"D{i} x{j}", float(err)))

    report.lines = {"plane": plane, "nilpotent": nil, "dx_diag": diag, "dx_off": off}
    return report


def rewrite_normal(poly: Dict[Tuple[int, ...], complex], rs: RelationSet, rightmost: bool = False, max_steps: int = 10_000):
    """Rewrite ascending adjacent pairs with the plane rules until all words are non-increasing.

    Only single-direction rules ``x_i x_j -> ...`` with ``i < j`` are used;
    squares of nilpotent generators are dropped.
    """
    rules = {r.lhs: r.rhs for r in rs.plane if r.lhs[0] < r.lhs[1]}
    nil = set(rs.nilpotent)
    poly = dict(poly)
    for _ in range(max_steps):
        target = None
        for word in sorted(poly):
            positions = [p for p in range(len(word) - 1) if word[p] < word[p + 1] or (word[p] == word[p + 1] and word[p] in nil)]
            if positions:
                target = (word, positions[-1] if rightmost else positions[0])
                break
        if target is None:
            return {w: c for w, c in poly.items() if abs(c) >= PRUNE_TOL}
        word, p = target
        c = poly.pop(word)
        pair = word[p : p + 2]
        if pair[0] == pair[1]:
            continue
        if pair not in rules:
            raise InvalidInputError(f"no rewrite rule for x{pair[0]} x{pair[1]}")
        for mono, v in rules[pair]:
            new = word[:p] + mono + word[p + 2 :]
            poly[new] = poly.get(new, 0) + c * v
    raise NumericalError("rewriting did not terminate")
