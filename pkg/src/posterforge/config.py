"""Run configuration, loaded from one YAML or JSON file."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigurationError
from .gateway import BackendDescriptor, Gateway, TokenLedger
from .layout.tree import ASPECT_MAX, ASPECT_MIN, DEFAULT_TITLE_FRACTION, PosterGeometry
from .layout.weights import DEFAULT_LAMBDA
from .quiz.scoring import DEFAULT_W


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GeometryConfig(_Section):
    width_px: int = Field(default=3456, gt=0)
    height_px: int = Field(default=2592, gt=0)
    title_strip_fraction: float = Field(default=DEFAULT_TITLE_FRACTION, gt=0, lt=0.3)

    def build(self) -> PosterGeometry:
        return PosterGeometry(self.width_px, self.height_px, self.title_strip_fraction)


class BackendConfig(_Section):
    id: str = Field(min_length=1)
    modality: Literal["text", "vision"]
    endpoint: dict = Field(default_factory=lambda: {"kind": "mock"})
    price_in: float = Field(default=0.0, ge=0)
    price_out: float = Field(default=0.0, ge=0)
    max_retries: int = Field(default=2, ge=0)
    max_in_flight: int = Field(default=4, ge=1)
    image_token_cost: int = Field(default=765, ge=0)

    def build(self) -> BackendDescriptor:
        return BackendDescriptor.from_dict(self.model_dump())


class LayoutConfig(_Section):
    lam: float = Field(default=DEFAULT_LAMBDA, ge=0, alias="lambda")
    a_min: float = Field(default=ASPECT_MIN, gt=0)
    a_max: float = Field(default=ASPECT_MAX, gt=0)

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class PainterConfig(_Section):
    max_iters: int = Field(default=4, ge=1)
    parallel: bool = False
    workers: int = Field(default=4, ge=1)
    critic: Literal["vision", "fit"] = "vision"
    render_command: Optional[Union[str, list[str]]] = None


class ConverterConfig(_Section):
    command: Optional[Union[str, list[str]]] = None
    timeout: float = Field(default=600, gt=0)


class LMConfig(_Section):
    kind: Literal["uniform", "hf"] = "uniform"
    vocab_size: int = Field(default=50257, ge=1)
    model: str = "gpt2"


class EvaluationConfig(_Section):
    embedder: Literal["mock", "altclip"] = "mock"
    embedder_model: str = "BAAI/AltCLIP"
    lm: LMConfig = Field(default_factory=LMConfig)
    ocr_command: Optional[Union[str, list[str]]] = None
    judge_parallel: bool = False


class ReaderConfig(_Section):
    backend: str
    group: str = "all"


class QuizConfig(_Section):
    w: float = Field(default=DEFAULT_W, gt=0)
    readers: list[ReaderConfig] = Field(default_factory=list)


class BenchConfig(_Section):
    workers: int = Field(default=1, ge=1)


class RunConfig(_Section):
    geometry: GeometryConfig = Field(default_factory=GeometryConfig)
    backends: list[BackendConfig] = Field(min_length=1)
    routing: dict[str, str] = Field(default_factory=dict)
    layout: LayoutConfig = Field(default_factory=LayoutConfig)
    painter: PainterConfig = Field(default_factory=PainterConfig)
    converter: ConverterConfig = Field(default_factory=ConverterConfig)
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)
    quiz: QuizConfig = Field(default_factory=QuizConfig)
    bench: BenchConfig = Field(default_factory=BenchConfig)
    workdir: Optional[str] = None
    base_dir: Optional[str] = None  # where relative fixture paths resolve; set by load_config

    @model_validator(mode="after")
    def _references(self) -> RunConfig:
        ids = [b.id for b in self.backends]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate backend ids in {ids}")
        for role, backend in self.routing.items():
            if backend not in ids:
                raise ValueError(f"role '{role}' routed to undefined backend '{backend}'")
        modality = {b.id: b.modality for b in self.backends}
        for reader in self.quiz.readers:
            if reader.backend not in ids:
                raise ValueError(f"quiz reader uses undefined backend '{reader.backend}'")
            if modality[reader.backend] != "vision":
                raise ValueError(f"quiz reader backend '{reader.backend}' must accept images")
        if self.layout.a_min >= self.layout.a_max:
            raise ValueError("layout.a_min must be below layout.a_max")
        return self

    def descriptors(self) -> list[BackendDescriptor]:
        return [b.build() for b in self.backends]

    def make_gateway(self, ledger: Optional[TokenLedger] = None, responders=None, retry_wait: float = 0.5) -> Gateway:
        base = Path(self.base_dir) if self.base_dir else None
        return Gateway(self.descriptors(), self.routing, ledger=ledger, base_dir=base, responders=responders, retry_wait=retry_wait)


def parse_config(data: dict, base_dir: Optional[Path] = None) -> RunConfig:
    if base_dir is not None and "base_dir" not in data:
        data = {**data, "base_dir": str(base_dir)}
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        problems = "; ".join(f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}" for e in exc.errors())
        raise ConfigurationError(f"invalid configuration: {problems}") from exc


def load_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text) if path.suffix.lower() in (".yaml", ".yml") else json.loads(text)
    except (yaml.YAMLError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot parse config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"config {path} must be a mapping")
    return parse_config(data, path.parent.resolve())
