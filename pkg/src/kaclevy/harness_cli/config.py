"""JSON run configuration: parsing, validation and re-emission."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import KacLevyError
from ..levy_models import (
    BrownianDrift,
    CompoundPoissonBilateral,
    CompoundPoissonExp,
    Dirac,
    Drift,
    Exponential,
    Gaussian,
    StableSubordinator,
    TwoPoint,
)
from ..regime import Jump, RegimeModel, Renewal

TASKS = ("transform", "limit-density", "expfun", "simulate", "verify")
FORMATS = ("csv", "json")
DEFAULT_PATHS = 100_000
DEFAULT_SEED = 42


class ConfigError(KacLevyError):
    pass


class ParseError(ConfigError):
    def __init__(self, msg: str, line: int, column: int, path: str = "$"):
        super().__init__(f"{path}: {msg} (line {line}, column {column})")
        self.line, self.column, self.path = line, column, path


class ValidationError(ConfigError):
    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path
        self.reason = msg


# field name -> (constructor argument, required, default)
BLOCK_TYPES = {
    "drift": (Drift, {"c": None}),
    "brownian": (BrownianDrift, {"c": None, "sigma": None}),
    "cp_exp": (CompoundPoissonExp, {"c": None, "nu": None, "a": None, "orientation": 1}),
    "cp_bilateral": (CompoundPoissonBilateral,
                     {"c": None, "nu": None, "p": None, "a_plus": None, "a_minus": None,
                      "sigma": 0.0}),
    "stable": (StableSubordinator, {"a": None, "alpha": None, "sign": 1}),
}
LAW_TYPES = {
    "dirac": (Dirac, {"y": None}),
    "exponential": (Exponential, {"rate": None, "sign": 1}),
    "gaussian": (Gaussian, {"mean": None, "sd": None}),
    "two_point": (TwoPoint, {"y_a": None, "y_b": None, "prob_a": None}),
}
INT_FIELDS = {"orientation", "sign"}


@dataclass(frozen=True)
class Axis:
    """Either explicit values or a linspace(start, stop, num)."""

    values: tuple[float, ...] = ()
    start: float | None = None
    stop: float | None = None
    num: int | None = None

    def points(self) -> np.ndarray:
        if self.num is not None:
            return np.linspace(self.start, self.stop, self.num)
        return np.asarray(self.values, dtype=float)

    def to_json(self):
        if self.num is not None:
            return {"start": self.start, "stop": self.stop, "num": self.num}
        return list(self.values)


@dataclass(frozen=True)
class ModelSpec:
    variant: str
    lambdas: tuple[float, float]
    blocks: tuple[dict, dict]
    laws: tuple[dict, dict]

    def build(self) -> RegimeModel:
        blocks = [_make(BLOCK_TYPES, b) for b in self.blocks]
        laws = [_make(LAW_TYPES, w) for w in self.laws]
        variant = Renewal(*laws) if self.variant == "renewal" else Jump(*laws)
        return RegimeModel(self.lambdas[0], self.lambdas[1], blocks[0], blocks[1], variant)

    def to_json(self):
        return {"variant": self.variant, "lambda": list(self.lambdas),
                "blocks": [dict(b) for b in self.blocks], "laws": [dict(w) for w in self.laws]}


@dataclass(frozen=True)
class McSpec:
    """``paths`` stays None unless given; tasks then use DEFAULT_PATHS and the
    verify suites use their own per-check sample sizes."""

    paths: int | None = None
    seed: int = DEFAULT_SEED
    rel_tol: float = 1e-12
    max_horizon: float = 1e4
    workers: int = 1

    @property
    def n_paths(self) -> int:
        return DEFAULT_PATHS if self.paths is None else self.paths

    def to_json(self):
        doc = {} if self.paths is None else {"paths": self.paths}
        return doc | {"seed": self.seed, "rel_tol": self.rel_tol,
                "max_horizon": self.max_horizon, "workers": self.workers}


@dataclass(frozen=True)
class RunConfig:
    task: str
    model: ModelSpec | None = None
    grid: dict = field(default_factory=dict)  # axis name -> Axis
    mc: McSpec = McSpec()
    start_regime: int = 0
    suite: str = "all"
    output: str | None = None
    format: str = "csv"

    def to_json(self) -> dict:
        doc: dict[str, Any] = {"task": self.task}
        if self.model is not None:
            doc["model"] = self.model.to_json()
        if self.grid:
            doc["grid"] = {k: v.to_json() for k, v in sorted(self.grid.items())}
        doc["mc"] = self.mc.to_json()
        doc["start_regime"] = self.start_regime
        doc["suite"] = self.suite
        if self.output is not None:
            doc["output"] = self.output
        doc["format"] = self.format
        return doc


def _make(table, spec: dict):
    cls, fields = table[spec["type"]]
    kwargs = {k: spec.get(k, default) for k, default in fields.items()}
    return cls(**kwargs)


# ---------------------------------------------------------------------------
# Validation helpers
# ---------------------------------------------------------------------------


def _expect_object(value, path):
    if not isinstance(value, dict):
        raise ValidationError(path, "expected an object")
    return value


def _reject_unknown(obj: dict, allowed, path):
    for key in obj:
        if key not in allowed:
            raise ValidationError(f"{path}.{key}", "unknown key")


def _number(value, path, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(path, "expected a number")
    if integer:
        if isinstance(value, float) and not value.is_integer():
            raise ValidationError(path, "expected an integer")
        return int(value)
    if not np.isfinite(value):
        raise ValidationError(path, "must be finite")
    return float(value)


def _typed_spec(table, value, path, kind):
    obj = _expect_object(value, path)
    if "type" not in obj:
        raise ValidationError(f"{path}.type", f"missing {kind} type")
    name = obj["type"]
    if name not in table:
        raise ValidationError(f"{path}.type", f"unknown {kind} type {name!r}; expected one of {sorted(table)}")
    cls, fields = table[name]
    _reject_unknown(obj, set(fields) | {"type"}, path)
    out = {"type": name}
    for key, default in fields.items():
        if key in obj:
            out[key] = _number(obj[key], f"{path}.{key}", integer=key in INT_FIELDS)
        elif default is None:
            raise ValidationError(f"{path}.{key}", "missing required field")
    try:
        _make(table, out)
    except (ValueError, TypeError) as exc:
        raise ValidationError(path, str(exc)) from None
    return out


def _pair(value, path):
    if not isinstance(value, list) or len(value) != 2:
        raise ValidationError(path, "expected a list of two entries")
    return value


def _parse_model(value, path="$.model") -> ModelSpec:
    obj = _expect_object(value, path)
    _reject_unknown(obj, {"variant", "lambda", "blocks", "laws"}, path)
    for key in ("variant", "lambda", "blocks", "laws"):
        if key not in obj:
            raise ValidationError(f"{path}.{key}", "missing required field")
    if obj["variant"] not in ("renewal", "jump"):
        raise ValidationError(f"{path}.variant", "must be 'renewal' or 'jump'")
    lam = [_number(v, f"{path}.lambda[{i}]") for i, v in enumerate(_pair(obj["lambda"], f"{path}.lambda"))]
    for i, v in enumerate(lam):
        if not v > 0:
            raise ValidationError(f"{path}.lambda[{i}]", f"lambda{i} must be > 0")
    blocks = tuple(_typed_spec(BLOCK_TYPES, b, f"{path}.blocks[{i}]", "block")
                   for i, b in enumerate(_pair(obj["blocks"], f"{path}.blocks")))
    laws = tuple(_typed_spec(LAW_TYPES, w, f"{path}.laws[{i}]", "law")
                 for i, w in enumerate(_pair(obj["laws"], f"{path}.laws")))
    spec = ModelSpec(obj["variant"], (lam[0], lam[1]), blocks, laws)
    try:
        spec.build()
    except (ValueError, TypeError) as exc:
        raise ValidationError(path, str(exc)) from None
    return spec


def _parse_axis(value, path) -> Axis:
    if isinstance(value, list):
        if not value:
            raise ValidationError(path, "grid must be nonempty")
        return Axis(values=tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(value)))
    obj = _expect_object(value, path)
    _reject_unknown(obj, {"start", "stop", "num"}, path)
    for key in ("start", "stop", "num"):
        if key not in obj:
            raise ValidationError(f"{path}.{key}", "missing required field")
    num = _number(obj["num"], f"{path}.num", integer=True)
    if num < 1:
        raise ValidationError(f"{path}.num", "grid must be nonempty")
    return Axis(start=_number(obj["start"], f"{path}.start"),
                stop=_number(obj["stop"], f"{path}.stop"), num=num)


def _parse_mc(value, path="$.mc") -> McSpec:
    obj = _expect_object(value, path)
    _reject_unknown(obj, {"paths", "seed", "rel_tol", "max_horizon", "workers"}, path)
    kw = {}
    if "paths" in obj:
        kw["paths"] = _number(obj["paths"], f"{path}.paths", integer=True)
        if kw["paths"] < 1:
            raise ValidationError(f"{path}.paths", "paths must be >= 1")
    if "seed" in obj:
        kw["seed"] = _number(obj["seed"], f"{path}.seed", integer=True)
        if not 0 <= kw["seed"] < 2**64:
            raise ValidationError(f"{path}.seed", "seed must be an unsigned 64-bit integer")
    if "rel_tol" in obj:
        kw["rel_tol"] = _number(obj["rel_tol"], f"{path}.rel_tol")
        if not 0 < kw["rel_tol"] < 1:
            raise ValidationError(f"{path}.rel_tol", "rel_tol must lie in (0, 1)")
    if "max_horizon" in obj:
        kw["max_horizon"] = _number(obj["max_horizon"], f"{path}.max_horizon")
        if not kw["max_horizon"] > 0:
            raise ValidationError(f"{path}.max_horizon", "max_horizon must be > 0")
    if "workers" in obj:
        kw["workers"] = _number(obj["workers"], f"{path}.workers", integer=True)
        if kw["workers"] < 1:
            raise ValidationError(f"{path}.workers", "workers must be >= 1")
    return McSpec(**kw)


GRID_AXES = ("t", "theta", "xi", "x")
TOP_KEYS = {"task", "model", "grid", "mc", "start_regime", "suite", "output", "format"}
SUITES = ("all", "fig1", "jump", "reduction", "residuals", "fig2", "fig3", "infinite", "stable")


def config_from_dict(doc) -> RunConfig:
    obj = _expect_object(doc, "$")
    _reject_unknown(obj, TOP_KEYS, "$")
    if "task" not in obj:
        raise ValidationError("$.task", "missing required field")
    task = obj["task"]
    if task not in TASKS:
        raise ValidationError("$.task", f"unknown task {task!r}; expected one of {list(TASKS)}")
    model = _parse_model(obj["model"]) if "model" in obj else None
    if model is None and task != "verify":
        raise ValidationError("$.model", f"task {task!r} needs a model")

    grid = {}
    if "grid" in obj:
        g = _expect_object(obj["grid"], "$.grid")
        _reject_unknown(g, GRID_AXES, "$.grid")
        grid = {k: _parse_axis(v, f"$.grid.{k}") for k, v in g.items()}
    mc = _parse_mc(obj["mc"]) if "mc" in obj else McSpec()

    start = obj.get("start_regime", 0)
    if start not in (0, 1) or isinstance(start, bool):
        raise ValidationError("$.start_regime", "start_regime must be 0 or 1")
    suite = obj.get("suite", "all")
    if suite not in SUITES:
        raise ValidationError("$.suite", f"unknown suite {suite!r}; expected one of {list(SUITES)}")
    output = obj.get("output")
    if output is not None and not isinstance(output, str):
        raise ValidationError("$.output", "expected a string")
    fmt = obj.get("format", "csv")
    if fmt not in FORMATS:
        raise ValidationError("$.format", "format must be 'csv' or 'json'")
    return RunConfig(task=task, model=model, grid=grid, mc=mc, start_regime=int(start),
                     suite=suite, output=output, format=fmt)


def parse_config(document: str) -> RunConfig:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return config_from_dict(doc)


def emit_config(config: RunConfig) -> str:
    return json.dumps(config.to_json(), indent=2)
