"""Request and response models for the walk service.

Every endpoint returns a `RunResult`: a metadata mapping plus a list of
uniform row mappings.  The CLI renders the same payload as CSV or JSON, so
the row keys double as column names.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field

from ..cavity import CavityModel


class CavitySpec(BaseModel):
    """Wire form of a cavity configuration."""

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    model: Literal["jcm", "id", "2ph", "mph"]
    r: int = Field(default=0, ge=0)
    m: int | None = Field(default=None, ge=1)
    lam: float = Field(default=1.0, gt=0.0, alias="lambda")
    t: float = Field(default=0.0, ge=0.0)

    def to_model(self) -> CavityModel:
        return CavityModel(variant=self.model, r=self.r, m=self.m, lam=self.lam, t=self.t)


class WalkRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    steps: int = Field(ge=0)
    k: int = Field(default=2, ge=1)
    chi: float = 0.0
    cavity: CavitySpec | None = None


class LimitRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    chi: float = 0.0
    cavity: CavitySpec | None = None
    samples: int = Field(default=201, ge=1)


class CavityRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    chi: float = 0.0
    cavity: CavitySpec


class ResonanceRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    chi: float = 0.0
    count: int = Field(default=1, ge=1)
    cavity: CavitySpec


class ConvergeRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    steps: list[int] = Field(min_length=1)
    k: int = Field(default=2, ge=1)
    chi: float = 0.0
    cavity: CavitySpec | None = None


class RunResult(BaseModel):
    """Uniform response: run metadata plus one mapping per output row."""

    meta: dict[str, Any]
    rows: list[dict[str, Any]]
