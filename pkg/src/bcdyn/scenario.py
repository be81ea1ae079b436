"""Scenario files: a flat JSON document naming all 26 parameters, the
initial state, integration settings, sample count, seed and label.

Unknown keys are rejected everywhere; reproducibility comes from files and
flags only (no environment-variable configuration).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .integrator import IntegrationConfig
from .model import PARAM_NAMES, STATE_NAMES, DomainError, ModelParams, SystemState, validate_params

__all__ = ["Scenario", "ScenarioError", "load_scenario", "parse_scenario", "default_scenario"]


class ScenarioError(ValueError):
    pass


_INTEGRATION_KEYS = {
    "t0", "t_end", "rel_tol", "abs_tol", "max_step", "initial_step", "negativity_floor",
}
_TOP_KEYS = {"params", "initial_state", "integration", "sample_count", "seed", "label"}


@dataclass(frozen=True)
class Scenario:
    params: ModelParams
    initial_state: SystemState
    integration: IntegrationConfig
    sample_count: int
    seed: int
    label: str


def parse_scenario(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")
    unknown = sorted(set(doc) - _TOP_KEYS)
    missing = sorted(_TOP_KEYS - set(doc))
    if unknown or missing:
        raise ScenarioError(f"scenario keys: missing={missing} unknown={unknown}")

    p = doc["params"]
    if not isinstance(p, dict):
        raise ScenarioError("params must be an object")
    p_unknown = sorted(set(p) - set(PARAM_NAMES))
    p_missing = sorted(set(PARAM_NAMES) - set(p))
    if p_unknown or p_missing:
        raise ScenarioError(f"params keys: missing={p_missing} unknown={p_unknown}")
    try:
        params = ModelParams.from_dict(p)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"bad params: {exc}") from exc
    violations = validate_params(params)
    if violations:
        raise ScenarioError("invalid params: " + "; ".join(violations))

    st = doc["initial_state"]
    if not isinstance(st, dict) or sorted(st) != sorted(STATE_NAMES):
        raise ScenarioError(f"initial_state must name exactly {STATE_NAMES}")
    try:
        state = SystemState(**{k: float(st[k]) for k in STATE_NAMES})
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"bad initial_state: {exc}") from exc
    if any(v < 0 for v in state.as_tuple()):
        raise ScenarioError("initial_state components must be nonnegative")

    integ = doc["integration"]
    if not isinstance(integ, dict):
        raise ScenarioError("integration must be an object")
    bad = sorted(set(integ) - _INTEGRATION_KEYS)
    if bad:
        raise ScenarioError(f"unknown integration keys: {bad}")
    if "t0" not in integ or "t_end" not in integ:
        raise ScenarioError("integration requires t0 and t_end")
    try:
        cfg = IntegrationConfig(**{k: v for k, v in integ.items()})
    except (TypeError, DomainError) as exc:
        raise ScenarioError(f"bad integration config: {exc}") from exc

    sample_count = doc["sample_count"]
    if not isinstance(sample_count, int) or sample_count < 2:
        raise ScenarioError("sample_count must be an integer >= 2")
    seed = doc["seed"]
    if not isinstance(seed, int) or seed < 0:
        raise ScenarioError("seed must be a nonnegative integer")
    label = doc["label"]
    if not isinstance(label, str) or not label:
        raise ScenarioError("label must be a nonempty string")
    return Scenario(
        params=params,
        initial_state=state,
        integration=cfg,
        sample_count=sample_count,
        seed=seed,
        label=label,
    )


def load_scenario(path: str | Path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed scenario JSON: {exc}") from exc
    return parse_scenario(doc)


def default_scenario() -> Scenario:
    """The bundled illustrative scenario (non-normative magnitudes)."""
    text = resources.files("bcdyn.data").joinpath("default.scenario.json").read_text("utf-8")
    return parse_scenario(json.loads(text))
