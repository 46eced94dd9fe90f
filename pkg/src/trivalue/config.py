"""JSON run-configuration loading.

A config file carries exactly one model, tagged by its "model" field:

    {
      "schema_version": 1,
      "model": "pipeline",
      "g_prior": {"mean": 0.0, "sd": 0.9},
      "g_star": 1.49,
      "market_value": 100.0,
      "stages": [
        {"rho": 0.5, "mu_delta": 0.0, "sigma_delta": 0.9,
         "sigma_hat": 1.05, "delta_min": 0.1,
         "criterion": {"type": "frequentist_alpha", "alpha": 0.77}},
        ...
      ]
    }

    {
      "schema_version": 1,
      "model": "rnpv",
      "reward": 100.0,
      "costs": [10.0, 20.0],
      "probs": [0.6, 0.5],
      "p0": 1.0
    }

Criterion variants: {"type": "frequentist_alpha", "alpha": a} (delta_min is
taken from the stage), {"type": "absolute_cutoff", "c": x}, and
{"type": "top_fraction", "q": q}. An rnpv config may omit "probs" when the
CLI fills them from a pipeline run (--from-pipeline).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional, Union

from .distributions import Gaussian1D
from .errors import ConfigError
from .pipeline import PipelineSpec
from .rnpv import RnpvSpec
from .tripartite import (
    AbsoluteCutoff,
    FrequentistAlpha,
    StageSpec,
    SuccessCriterion,
    TopFraction,
)

SCHEMA_VERSION = 1


def _require(obj: dict, key: str, where: str) -> Any:
    if key not in obj:
        raise ConfigError(f"{where}: missing required field '{key}'")
    return obj[key]


def _number(obj: dict, key: str, where: str, default=None) -> float:
    if key not in obj:
        if default is not None:
            return default
        raise ConfigError(f"{where}: missing required field '{key}'")
    value = obj[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{where}: field '{key}' must be a number, got {value!r}")
    return float(value)


def _parse_criterion(obj: Any, delta_min: float, where: str) -> SuccessCriterion:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: 'criterion' must be an object")
    kind = _require(obj, "type", where)
    if kind == "frequentist_alpha":
        return FrequentistAlpha(alpha=_number(obj, "alpha", where), delta_min=delta_min)
    if kind == "absolute_cutoff":
        return AbsoluteCutoff(c=_number(obj, "c", where))
    if kind == "top_fraction":
        return TopFraction(q=_number(obj, "q", where))
    raise ConfigError(f"{where}: unknown criterion type {kind!r}")


def _parse_stage(obj: Any, index: int) -> StageSpec:
    where = f"stages[{index}]"
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: each stage must be an object")
    delta_min = _number(obj, "delta_min", where, default=0.0)
    try:
        return StageSpec(
            rho=_number(obj, "rho", where),
            delta_prior=Gaussian1D(
                mean=_number(obj, "mu_delta", where),
                sd=_number(obj, "sigma_delta", where),
            ),
            sigma_hat=_number(obj, "sigma_hat", where),
            criterion=_parse_criterion(_require(obj, "criterion", where), delta_min, where),
            delta_min=delta_min,
        )
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _parse_pipeline(doc: dict) -> PipelineSpec:
    g_prior = _require(doc, "g_prior", "config")
    if not isinstance(g_prior, dict):
        raise ConfigError("config: 'g_prior' must be an object with mean and sd")
    stages = _require(doc, "stages", "config")
    if not isinstance(stages, list) or not stages:
        raise ConfigError("config: 'stages' must be a non-empty array")
    try:
        return PipelineSpec(
            g_prior=Gaussian1D(
                mean=_number(g_prior, "mean", "g_prior"),
                sd=_number(g_prior, "sd", "g_prior"),
            ),
            g_star=_number(doc, "g_star", "config"),
            stages=tuple(_parse_stage(s, i) for i, s in enumerate(stages)),
            market_value=_number(doc, "market_value", "config", default=1.0),
        )
    except ValueError as exc:
        raise ConfigError(f"config: {exc}") from exc


def _parse_rnpv(doc: dict, allow_missing_probs: bool = False) -> RnpvSpec:
    costs = _require(doc, "costs", "config")
    if not isinstance(costs, list) or not costs:
        raise ConfigError("config: 'costs' must be a non-empty array")
    probs = doc.get("probs")
    if probs is None:
        if not allow_missing_probs:
            raise ConfigError("config: missing required field 'probs'")
        probs = [1.0] * len(costs)  # placeholder; replaced by the caller
    if not isinstance(probs, list):
        raise ConfigError("config: 'probs' must be an array")
    try:
        return RnpvSpec(
            reward=_number(doc, "reward", "config"),
            costs=tuple(float(c) for c in costs),
            probs=tuple(float(p) for p in probs),
            p0=_number(doc, "p0", "config", default=1.0),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config: {exc}") from exc


def load_document(path: Union[str, Path]) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top-level value must be an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"{path}: unsupported schema_version {version!r} (expected {SCHEMA_VERSION})"
        )
    return doc


def load_pipeline_spec(path: Union[str, Path]) -> PipelineSpec:
    doc = load_document(path)
    if doc.get("model") != "pipeline":
        raise ConfigError(f"{path}: expected a pipeline config, got model={doc.get('model')!r}")
    return _parse_pipeline(doc)


def load_rnpv_spec(
    path: Union[str, Path], allow_missing_probs: bool = False
) -> RnpvSpec:
    doc = load_document(path)
    if doc.get("model") != "rnpv":
        raise ConfigError(f"{path}: expected an rnpv config, got model={doc.get('model')!r}")
    return _parse_rnpv(doc, allow_missing_probs=allow_missing_probs)


def load_spec(path: Union[str, Path]) -> tuple[str, Union[PipelineSpec, RnpvSpec]]:
    """Load either model kind; returns (kind, spec)."""
    doc = load_document(path)
    kind = doc.get("model")
    if kind == "pipeline":
        return kind, _parse_pipeline(doc)
    if kind == "rnpv":
        return kind, _parse_rnpv(doc)
    raise ConfigError(f"{path}: 'model' must be 'pipeline' or 'rnpv', got {kind!r}")
