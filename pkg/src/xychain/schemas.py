"""Pydantic request/response models: the JSON config schema and wire formats."""

from __future__ import annotations

import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .model import ChainSpec, DrivingProfile


class ProfileModel(BaseModel):
    """One drive; see DrivingProfile for the closed forms."""

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    kind: Literal["constant", "exp", "cos", "sin", "tanh", "proportional"]
    j0: float = 0.0
    j1: float = 0.0
    k: float = 1.0
    lam: float = Field(1.0, alias="lambda")

    @model_validator(mode="after")
    def _check(self):
        if self.kind in ("exp", "cos", "sin", "tanh") and not self.k > 0:
            raise ValueError(f"profile kind {self.kind!r} requires k > 0")
        if self.kind == "proportional" and self.lam == 0:
            raise ValueError("proportional profile requires a nonzero factor")
        return self

    def to_core(self) -> DrivingProfile:
        return DrivingProfile(kind=self.kind, j0=self.j0, j1=self.j1, k=self.k,
                              lam=self.lam)


class ChainModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_sites: int = Field(..., ge=4)
    gamma: float = Field(..., ge=0.0, le=1.0)
    kT: float = Field(0.0, ge=0.0)
    j_profile: ProfileModel
    h_profile: ProfileModel

    @model_validator(mode="after")
    def _check(self):
        if self.n_sites % 2:
            raise ValueError("n_sites must be even")
        if self.j_profile.kind == "proportional" and self.h_profile.kind == "proportional":
            raise ValueError("at most one drive may be proportional to the other")
        return self

    def to_core(self) -> ChainSpec:
        return ChainSpec(n_sites=self.n_sites, gamma=self.gamma,
                         j_profile=self.j_profile.to_core(),
                         h_profile=self.h_profile.to_core(), kT=self.kT)


def default_t_max(chain: ChainModel) -> float:
    """20/K for transient drives, 10 periods for periodic ones, 10 otherwise."""
    kinds = {}
    for prof in (chain.j_profile, chain.h_profile):
        if prof.kind in ("exp", "cos", "sin", "tanh"):
            kinds.setdefault(prof.kind, prof.k)
    periodic = [kinds[k] for k in ("cos", "sin") if k in kinds]
    if periodic:
        return 10.0 * 2.0 * math.pi / min(periodic)
    transient = [kinds[k] for k in ("exp", "tanh") if k in kinds]
    if transient:
        return 20.0 / min(transient)
    return 10.0


class RunConfig(BaseModel):
    """One timeseries run; the JSON document accepted by `run`."""

    model_config = ConfigDict(extra="forbid")

    chain: ChainModel
    t_max: Optional[float] = Field(None, ge=0.0)
    n_samples: int = Field(400, ge=2)
    separations: list = Field(default_factory=lambda: [1])
    solver: Literal["numeric", "exact", "auto"] = "auto"
    tol: float = Field(1e-9, gt=0.0)
    output_path: Optional[str] = None

    @field_validator("separations")
    @classmethod
    def _seps(cls, v):
        if not v:
            raise ValueError("separations must not be empty")
        if any(int(r) != r or r < 1 for r in v):
            raise ValueError("separations must be integers >= 1")
        return [int(r) for r in v]

    @model_validator(mode="after")
    def _resolve(self):
        if self.t_max is None:
            self.t_max = default_t_max(self.chain)
        if max(self.separations) > self.chain.n_sites // 2:
            raise ValueError("separations must not exceed N/2")
        return self


class VariantModel(BaseModel):
    """An alternative drive pair swept alongside the base config."""

    model_config = ConfigDict(extra="forbid")

    label: str = Field(..., min_length=1, max_length=40, pattern=r"^[A-Za-z0-9_\-]+$")
    j_profile: ProfileModel
    h_profile: ProfileModel


class SweepConfig(BaseModel):
    """A parameter sweep; the JSON document accepted by `sweep`."""

    model_config = ConfigDict(extra="forbid")

    base: RunConfig
    sweep_variable: Literal["lambda", "kT", "K", "N"]
    values: list
    window_fraction: float = Field(0.3, gt=0.0, lt=1.0)
    variants: list = Field(default_factory=list)

    @field_validator("values")
    @classmethod
    def _values(cls, v):
        if not v:
            raise ValueError("values must not be empty")
        vals = [float(x) for x in v]
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("values must be strictly increasing")
        return vals

    @field_validator("variants")
    @classmethod
    def _variants(cls, v):
        return [x if isinstance(x, VariantModel) else VariantModel.model_validate(x) for x in v]


class RunResult(BaseModel):
    columns: list
    rows: list
    csv: str


class SweepResult(BaseModel):
    columns: list
    rows: list
    csv: str


class CheckResult(BaseModel):
    name: str
    worst: float
    tol: float
    passed: bool


class VerifyResult(BaseModel):
    passed: bool
    checks: list
    report: str


class PresetInfo(BaseModel):
    name: str
    kind: Literal["run", "sweep"]
    description: str
    config: dict


class ConfigDocument(BaseModel):
    """Free-form config document: optional `preset` plus overriding keys."""

    model_config = ConfigDict(extra="allow")

    preset: Optional[str] = None


class VerifyRequest(BaseModel):
    max_n: int = Field(8, ge=4, le=12)
    threads: int = Field(1, ge=1, le=64)
    t_max: float = Field(10.0, gt=0.0)
