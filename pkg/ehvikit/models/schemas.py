from typing import List

from pydantic import BaseModel, Field, field_validator, model_validator

from ehvikit.models.enums import CriterionEnum, FrontKindEnum


class FrontSpec(BaseModel):
    kind: FrontKindEnum = FrontKindEnum.CONCAVE_SPHERICAL
    d: int = Field(ge=2)
    n: int = Field(ge=1)
    seed: int = 0
    radius: float = Field(default=1.0, gt=0)

    @field_validator("kind", mode="before")
    @classmethod
    def parse_kind(cls, value):
        if isinstance(value, str):
            return FrontKindEnum.from_string(value)
        return value


class RunConfig(BaseModel):
    """Settings of one MOBGO run; ``eta >= m + 1`` is checked against the problem."""

    eta: int = Field(default=30, ge=1)
    tc: int = Field(default=300, ge=1)
    criterion: CriterionEnum = CriterionEnum.EHVI
    ref_point: List[float] = Field(default_factory=list)
    inner_budget: int = Field(default=2000, ge=100)
    seed: int = 0
    kriging_budget: int = Field(default=1000, ge=1)
    nugget: float = Field(default=1e-10, ge=0)
    variance_floor: float = Field(default=1e-12, gt=0)
    fit_workers: int = Field(default=1, ge=1)

    @field_validator("criterion", mode="before")
    @classmethod
    def parse_criterion(cls, value):
        if isinstance(value, str):
            return CriterionEnum.from_string(value)
        return value

    @model_validator(mode="after")
    def check_budget(self):
        if self.tc < self.eta:
            raise ValueError(f"tc ({self.tc}) must be at least eta ({self.eta})")
        return self
