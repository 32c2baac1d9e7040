"""Run configuration files (TOML), see docs/formats.md for the schema."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Literal, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError, ExpressionError
from .grid import GridSpec
from .holomorphic import parse_holomorphic
from .verify import Tolerances


def parse_complex(value) -> complex:
    """Complex number from a number or from text like "1-2i"."""
    if isinstance(value, bool):
        raise ValueError("expected a complex number")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, str):
        from .holomorphic import Const

        node = parse_holomorphic(value)
        if not isinstance(node, Const):
            raise ValueError(f"{value!r} is not a constant")
        return node.value
    raise ValueError(f"cannot read {value!r} as a complex number")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GridConfig(_Strict):
    kind: Literal["rectangle", "annulus"] = "rectangle"
    x_min: float = -1.0
    x_max: float = 1.0
    y_min: float = -1.0
    y_max: float = 1.0
    r_min: float = 0.0
    r_max: float = 1.0
    theta_min: float = 0.0
    theta_max: float = 2 * math.pi
    nx: int = Field(32, ge=2)
    ny: int = Field(32, ge=2)

    @model_validator(mode="after")
    def _ordered(self):
        if self.kind == "rectangle" and not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("rectangle bounds must satisfy x_min < x_max and y_min < y_max")
        if self.kind == "annulus" and not (0 <= self.r_min < self.r_max and self.theta_min < self.theta_max):
            raise ValueError("annulus bounds must satisfy 0 <= r_min < r_max and theta_min < theta_max")
        return self

    def spec(self) -> GridSpec:
        if self.kind == "rectangle":
            bounds = (self.x_min, self.x_max, self.y_min, self.y_max)
        else:
            bounds = (self.r_min, self.r_max, self.theta_min, self.theta_max)
        return GridSpec(self.kind, bounds, self.nx, self.ny)


class TolerancesConfig(_Strict):
    weingarten: float = Field(Tolerances.weingarten, ge=0)
    metric: float = Field(Tolerances.metric, ge=0)
    conformal: float = Field(Tolerances.conformal, ge=0)
    wedge: float = Field(Tolerances.wedge, ge=0)
    brioschi: float = Field(Tolerances.brioschi, ge=0)

    def spec(self) -> Tolerances:
        return Tolerances(**self.model_dump())


class OutputsConfig(_Strict):
    mesh: Optional[str] = None
    csv: Optional[str] = None
    report: Optional[str] = None


class FamilyConfig(_Strict):
    rho: list[float] = Field(min_length=1)


class ReparamConfig(_Strict):
    a: complex
    b: complex
    c: complex
    d: complex

    @field_validator("a", "b", "c", "d", mode="before")
    @classmethod
    def _complex(cls, v):
        return parse_complex(v)


def _check_expression(v):
    if v is not None:
        try:
            parse_holomorphic(v)
        except ExpressionError as exc:
            raise ValueError(str(exc)) from exc
    return v


class SweepItem(_Strict):
    h: str
    mu: float
    grid: Optional[GridConfig] = None

    @field_validator("h")
    @classmethod
    def _parses(cls, v):
        return _check_expression(v)


class RunConfig(_Strict):
    h: Optional[str] = None
    mu: Optional[float] = None
    grid: GridConfig = GridConfig()
    fd_step: float = Field(1e-4, gt=0)
    brioschi_step: float = Field(1e-3, gt=0)
    r_scale: float = Field(1.0, gt=0)
    tolerances: TolerancesConfig = TolerancesConfig()
    outputs: OutputsConfig = OutputsConfig()
    family: Optional[FamilyConfig] = None
    reparam: Optional[ReparamConfig] = None
    sweep: Optional[list[SweepItem]] = None

    @field_validator("h")
    @classmethod
    def _parses(cls, v):
        return _check_expression(v)

    @field_validator("mu")
    @classmethod
    def _finite(cls, v):
        if v is not None and not math.isfinite(v):
            raise ValueError("mu must be finite")
        return v

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ConfigError("; ".join(f"field '{n}': required" for n in missing))


def _format_validation(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"field '{loc}': {err['msg']}")
    return "; ".join(lines)


def config_from_dict(raw: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(_format_validation(exc)) from None


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None  # message carries line and column
    return config_from_dict(raw)
