"""Sparse complex operators on tensor powers of a graded vector space.

Basis vectors of ``E^{(x)n}`` are multi-indices ``(i_1, ..., i_n)`` with labels
in ``1..dim``.  An operator maps each input multi-index to a sparse
combination of output multi-indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

from .errors import InvalidInputError
from .grading import GradingGroup, GroupElement

Index = Tuple[int, ...]
BlockKey = Tuple[GroupElement, ...]

DROP_TOL = 1e-15


@dataclass(frozen=True)
class GradedBasis:
    """Labels ``1..N`` with a grading map ``p: label -> group element``."""

    group: GradingGroup
    grades: Tuple[GroupElement, ...]  # grades[i - 1] = p(i)

    def __post_init__(self):
        if not self.grades:
            raise InvalidInputError("basis must contain at least one label")
        object.__setattr__(self, "grades", tuple(self.group.element(g) for g in self.grades))

    @classmethod
    def from_labels(cls, group: GradingGroup, labelled: Mapping[int, Sequence[int]]) -> "GradedBasis":
        labels = sorted(labelled)
        if labels != list(range(1, len(labels) + 1)):
            raise InvalidInputError(f"labels must be exactly 1..N, got {labels}")
        return cls(group, tuple(tuple(labelled[i]) for i in labels))

    @classmethod
    def standard(cls, group: GradingGroup) -> "GradedBasis":
        """One label per generator, ``p(i) = xi_i``."""
        return cls(group, tuple(group.generator(i) for i in range(group.rank)))

    @property
    def dim(self) -> int:
        return len(self.grades)

    @property
    def labels(self) -> range:
        return range(1, self.dim + 1)

    def grade(self, label: int) -> GroupElement:
        return self.grades[label - 1]

    def labels_of(self, grade: GroupElement) -> list[int]:
        grade = self.group.element(grade)
        return [i for i in self.labels if self.grade(i) == grade]

    def grades_in_use(self) -> list[GroupElement]:
        return sorted(set(self.grades))

    def block_keys(self) -> list[BlockKey]:
        used = self.grades_in_use()
        return [(a, b) for a in used for b in used]


class TensorOperator:
    """Immutable sparse operator on ``E^{(x)arity}`` with ``dim E = dim``."""

    __slots__ = ("dim", "arity", "_cols")

    def __init__(self, dim: int, arity: int, entries: Mapping[Index, Mapping[Index, complex]] | None = None):
        if dim < 1 or arity < 1:
            raise InvalidInputError(f"need dim >= 1 and arity >= 1, got {dim}, {arity}")
        self.dim = dim
        self.arity = arity
        cols: Dict[Index, Dict[Index, complex]] = {}
        for src, outs in (entries or {}).items():
            src = self._check_index(src)
            col = cols.setdefault(src, {})
            items = outs.items() if isinstance(outs, Mapping) else outs
            for dst, c in items:
                dst = self._check_index(dst)
                col[dst] = col.get(dst, 0) + complex(c)
        for src in list(cols):
            col = {d: c for d, c in cols[src].items() if abs(c) >= DROP_TOL}
            if col:
                cols[src] = col
            else:
                del cols[src]
        self._cols = cols

    def _check_index(self, idx) -> Index:
        idx = tuple(int(i) for i in idx)
        if len(idx) != self.arity or any(i < 1 or i > self.dim for i in idx):
            raise InvalidInputError(f"index {idx} invalid for dim={self.dim}, arity={self.arity}")
        return idx

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.dim, self.arity)

    def column(self, src: Index) -> Dict[Index, complex]:
        return dict(self._cols.get(tuple(src), {}))

    def items(self) -> Iterable[Tuple[Index, Index, complex]]:
        for src in sorted(self._cols):
            col = self._cols[src]
            for dst in sorted(col):
                yield src, dst, col[dst]

    def nnz(self) -> int:
        return sum(len(c) for c in self._cols.values())

    def inputs(self) -> list[Index]:
        return list(itertools.product(range(1, self.dim + 1), repeat=self.arity))

    def apply(self, vec: Mapping[Index, complex]) -> Dict[Index, complex]:
        out: Dict[Index, complex] = {}
        for src, c in vec.items():
            for dst, v in self._cols.get(tuple(src), {}).items():
                out[dst] = out.get(dst, 0) + c * v
        return out

    def _same_shape(self, other: "TensorOperator"):
        if self.shape != other.shape:
            raise InvalidInputError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __matmul__(self, other: "TensorOperator") -> "TensorOperator":
        return compose(self, other)

    def __add__(self, other: "TensorOperator") -> "TensorOperator":
        self._same_shape(other)
        entries = {s: dict(c) for s, c in self._cols.items()}
        for s, col in other._cols.items():
            acc = entries.setdefault(s, {})
            for d, v in col.items():
                acc[d] = acc.get(d, 0) + v
        return TensorOperator(self.dim, self.arity, entries)

    def __neg__(self) -> "TensorOperator":
        return (-1) * self

    def __sub__(self, other: "TensorOperator") -> "TensorOperator":
        return self + (-other)

    def __rmul__(self, scalar: complex) -> "TensorOperator":
        return TensorOperator(
            self.dim, self.arity, {s: {d: scalar * v for d, v in c.items()} for s, c in self._cols.items()}
        )

    def __repr__(self):
        return f"TensorOperator(dim={self.dim}, arity={self.arity}, nnz={self.nnz()})"

    def scale_columns(self, factor) -> "TensorOperator":
        """Multiply the image of each input ``src`` by ``factor(src)``."""
        return TensorOperator(
            self.dim,
            self.arity,
            {s: {d: factor(s) * v for d, v in c.items()} for s, c in self._cols.items()},
        )

    def to_dense(self) -> np.ndarray:
        """Matrix with ``M[out, in]``; multi-indices ordered lexicographically."""
        n = self.dim**self.arity
        m = np.zeros((n, n), dtype=complex)
        for src, dst, v in self.items():
            m[flat_index(dst, self.dim), flat_index(src, self.dim)] = v
        return m

    @classmethod
    def from_dense(cls, m: np.ndarray, dim: int, arity: int) -> "TensorOperator":
        n = dim**arity
        if m.shape != (n, n):
            raise InvalidInputError(f"dense matrix shape {m.shape} does not match {dim}^{arity}")
        idx = list(itertools.product(range(1, dim + 1), repeat=arity))
        entries: Dict[Index, Dict[Index, complex]] = {}
        rows, cols = np.nonzero(np.abs(m) >= DROP_TOL)
        for r, c in zip(rows, cols):
            entries.setdefault(idx[c], {})[idx[r]] = complex(m[r, c])
        return cls(dim, arity, entries)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "arity": self.arity,
            "entries": [
                {"in": list(s), "out": list(d), "re": _clean(v.real), "im": _clean(v.imag)}
                for s, d, v in self.items()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "TensorOperator":
        try:
            dim, arity = int(data["dim"]), int(data["arity"])
            entries: Dict[Index, list] = {}
            for e in data["entries"]:
                entries.setdefault(tuple(e["in"]), []).append((tuple(e["out"]), complex(e["re"], e["im"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed operator JSON: {exc}") from exc
        return cls(dim, arity, entries)


def _clean(x: float) -> float:
    # avoid "-0.0" in serialized output
    return 0.0 if x == 0 else float(x)


def flat_index(idx: Index, dim: int) -> int:
    out = 0
    for i in idx:
        out = out * dim + (i - 1)
    return out


def identity_op(dim: int, arity: int) -> TensorOperator:
    ids = itertools.product(range(1, dim + 1), repeat=arity)
    return TensorOperator(dim, arity, {i: {i: 1} for i in ids})


def flip_op(dim: int) -> TensorOperator:
    return TensorOperator(
        dim, 2, {(i, j): {(j, i): 1} for i in range(1, dim + 1) for j in range(1, dim + 1)}
    )


def compose(A: TensorOperator, B: TensorOperator) -> TensorOperator:
    """``A o B``: apply ``B`` first."""
    A._same_shape(B)
    return TensorOperator(A.dim, A.arity, {s: A.apply(col) for s, col in B._cols.items()})


def place_on_legs(A: TensorOperator, total_arity: int, first_leg: int) -> TensorOperator:
    """Embed a two-leg operator on legs ``(first_leg, first_leg + 1)`` (1-based)."""
    if A.arity != 2:
        raise InvalidInputError("place_on_legs expects an arity-2 operator")
    if not 1 <= first_leg <= total_arity - 1:
        raise InvalidInputError(f"first_leg={first_leg} out of range for arity {total_arity}")
    lo = first_leg - 1
    entries = {}
    for src in itertools.product(range(1, A.dim + 1), repeat=total_arity):
        col = A._cols.get(src[lo : lo + 2])
        if not col:
            continue
        entries[src] = {src[:lo] + d + src[lo + 2 :]: v for d, v in col.items()}
    return TensorOperator(A.dim, total_arity, entries)


def block_of(A: TensorOperator, basis: GradedBasis, key: BlockKey) -> TensorOperator:
    """Restriction of ``A`` to inputs whose grades are ``key`` (outputs unrestricted)."""
    if basis.dim != A.dim:
        raise InvalidInputError(f"basis dim {basis.dim} != operator dim {A.dim}")
    key = tuple(basis.group.element(g) for g in key)
    if len(key) != A.arity:
        raise InvalidInputError(f"block key length {len(key)} != arity {A.arity}")
    return TensorOperator(
        A.dim,
        A.arity,
        {s: c for s, c in A._cols.items() if tuple(basis.grade(i) for i in s) == key},
    )


def source_grades(basis: GradedBasis, idx: Index) -> BlockKey:
    return tuple(basis.grade(i) for i in idx)


def column_distances(A: TensorOperator, B: TensorOperator) -> Dict[Index, float]:
    """Per-input max absolute entry difference (inputs where both vanish omitted)."""
    A._same_shape(B)
    out = {}
    for src in set(A._cols) | set(B._cols):
        a, b = A._cols.get(src, {}), B._cols.get(src, {})
        out[src] = max(abs(a.get(d, 0) - b.get(d, 0)) for d in set(a) | set(b))
    return out


def op_distance(A: TensorOperator, B: TensorOperator) -> float:
    return max(column_distances(A, B).values(), default=0.0)
