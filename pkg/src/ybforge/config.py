"""Job configuration for the command line front end."""

from __future__ import annotations

from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from .errors import InvalidInputError
from .grading import (
    CommutationFactor,
    GradingGroup,
    factor_from_exponents,
    factor_from_omega,
    factor_supercommutation,
    factor_trivial,
)
from .linop import GradedBasis


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ComplexValue(_Strict):
    re: float
    im: float = 0.0

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


class ExponentsFactor(_Strict):
    kind: Literal["exponents"]
    s: Optional[List[List[int]]] = None
    a: Optional[List[List[int]]] = None
    z: ComplexValue = ComplexValue(re=1.0)


class OmegaFactor(_Strict):
    kind: Literal["omega"]
    omega: List[List[int]]
    N: int


class SuperFactor(_Strict):
    kind: Literal["super"]


class TrivialFactor(_Strict):
    kind: Literal["trivial"]


class BasisEntry(_Strict):
    label: int
    grade: List[int]


class Options(_Strict):
    triangular: Optional[ComplexValue] = None
    reduction_mode: Literal["split", "cocycle", "literal"] = "split"
    samples: int = Field(200, ge=1)
    seed: int = 0


class JobConfig(_Strict):
    group: List[int]
    factor: Union[ExponentsFactor, OmegaFactor, SuperFactor, TrivialFactor] = Field(discriminator="kind")
    basis: List[BasisEntry]
    q: ComplexValue
    variant: Literal["uniform", "literal"] = "uniform"
    tolerance: Optional[float] = Field(None, gt=0)
    options: Options = Options()

    def grading_group(self) -> GradingGroup:
        return GradingGroup(tuple(self.group))

    def commutation_factor(self) -> CommutationFactor:
        group = self.grading_group()
        fac = self.factor
        k = group.rank
        if isinstance(fac, ExponentsFactor):
            zeros = [[0] * k for _ in range(k)]
            return factor_from_exponents(group, fac.s or zeros, fac.a or zeros, fac.z.value)
        if isinstance(fac, OmegaFactor):
            return factor_from_omega(group, fac.omega, fac.N)
        if isinstance(fac, SuperFactor):
            if group.moduli != (2,):
                raise InvalidInputError("the super factor needs group [2]")
            return factor_supercommutation()
        return factor_trivial(group)

    def graded_basis(self) -> GradedBasis:
        group = self.grading_group()
        labelled = {}
        for entry in self.basis:
            if entry.label in labelled:
                raise InvalidInputError(f"duplicate label {entry.label}")
            labelled[entry.label] = group.element(entry.grade)
        return GradedBasis.from_labels(group, labelled)


def load_config(text: str) -> JobConfig:
    return JobConfig.model_validate_json(text)
