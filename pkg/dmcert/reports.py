"""Everything that leaves the process: certificate reports, tables, run config.

JSON is produced from these models only (see :mod:`dmcert.render`), so CSV and
ASCII can never disagree with it.
"""
from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator

from .fp_linalg import is_prime

FORMATS = ("json", "csv", "ascii")


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


class CertificateItem(BaseModel):
    model_config = ConfigDict(populate_by_name=True, frozen=True)

    id: str
    passed: bool = Field(alias="pass")
    detail: str
    value: Optional[int] = None


class CertificateReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True, frozen=True)

    p: int
    certificate: str
    statement: str
    items: List[CertificateItem]
    passed: bool = Field(alias="pass")

    @classmethod
    def from_items(cls, p: int, certificate: str, statement: str, items: List[CertificateItem]) -> "CertificateReport":
        return cls(p=p, certificate=certificate, statement=statement, items=items, passed=all(i.passed for i in items))

    def item(self, item_id: str) -> CertificateItem:
        for it in self.items:
            if it.id == item_id:
                return it
        raise KeyError(item_id)

    def failed_ids(self) -> List[str]:
        return [it.id for it in self.items if not it.passed]


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


class MonomialTerm(BaseModel):
    model_config = ConfigDict(frozen=True)

    set: List[int]
    exp: int


class BasisTable(BaseModel):
    p: int
    degrees: Dict[str, int]
    oracle: Optional[Dict[str, int]] = None
    matches_oracle: Optional[bool] = None


class OrbitTable(BaseModel):
    p: int
    degrees: Dict[str, int]
    fixed: List[List[MonomialTerm]]
    cycles: List[List[List[MonomialTerm]]]


class GroupCohomologyTable(BaseModel):
    p: int
    rep: str
    dimension: int
    dims: List[int]


class E2Cell(BaseModel):
    i: int
    j: int
    dim: int
    generators: List[str]
    killed_by_u_and_e: List[str] = Field(default_factory=list)


class E2Table(BaseModel):
    p: int
    max_i: int
    top_degree: int
    cells: List[E2Cell]
    total_dims: List[int]


class ConfigTable(BaseModel):
    """One exact configuration, every point as (z : w) coefficient vectors in η."""

    s: Optional[int] = None
    points: List[List[List[str]]]


class FixedPointsTable(BaseModel):
    p: int
    count: int
    configurations: List[ConfigTable]
    sigma_fixed: bool
    pairwise_distinct: bool
    power_map_checked: bool


class NodalWitnessRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    splits: List[List[int]]
    b: int
    c: int
    automorphisms: int
    case: str
    detail: str


class TreeTable(BaseModel):
    p: int
    count: int
    by_vertices: Dict[str, int]
    trees: List[List[List[int]]]
    cases: Dict[str, int]
    survivors: List[NodalWitnessRow]
    witnesses: List[NodalWitnessRow]
    no_nodal_fixed_points: bool


class MoebiusDegreeTable(BaseModel):
    p: int
    numerator_c_free: bool
    denominator_degree: int
    denominator: List[List[str]]
    rotation_at_c_zero: bool
    roots_checked: int
    roots_match_fixed: bool


class BorelTable(BaseModel):
    p: int
    max_degree: int
    dims: List[int]


# ---------------------------------------------------------------------------
# verify-all
# ---------------------------------------------------------------------------


class StageResult(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    name: str
    passed: bool = Field(alias="pass")
    detail: str
    value: Optional[int] = None
    seconds: Optional[float] = None


class VerifyAllReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    p: int
    window: int
    stages: List[StageResult]
    passed: bool = Field(alias="pass")
    cross_count: Optional[int] = None

    @model_validator(mode="after")
    def _pass_is_conjunction(self) -> "VerifyAllReport":
        if self.passed != all(s.passed for s in self.stages):
            raise ValueError("overall pass must equal the conjunction of stage passes")
        return self

    def stage(self, name: str) -> StageResult:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)


# ---------------------------------------------------------------------------
# CLI run configuration
# ---------------------------------------------------------------------------


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    subcommand: str
    p: Optional[int] = None
    n: Optional[int] = None
    format: str = "json"
    window: Optional[int] = None
    max_degree: Optional[int] = None
    max_i: Optional[int] = None
    rep: str = "trivial"
    input: Optional[str] = None
    out: Optional[str] = None
    check: bool = False
    timings: bool = False

    @field_validator("p")
    @classmethod
    def _prime(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and not is_prime(v):
            raise ValueError(f"p must be prime, got {v}")
        return v

    @field_validator("format")
    @classmethod
    def _known_format(cls, v: str) -> str:
        if v not in FORMATS:
            raise ValueError(f"format must be one of {', '.join(FORMATS)}, got {v!r}")
        return v

    @field_validator("window")
    @classmethod
    def _positive(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError(f"window must be >= 1, got {v}")
        return v

    @field_validator("max_degree", "max_i")
    @classmethod
    def _non_negative(cls, v: Optional[int], info: ValidationInfo) -> Optional[int]:
        if v is not None and v < 0:
            raise ValueError(f"{info.field_name} must be >= 0, got {v}")
        return v

    @field_validator("n")
    @classmethod
    def _enough_labels(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 2:
            raise ValueError(f"n must be >= 2 labels, got {v}")
        return v
