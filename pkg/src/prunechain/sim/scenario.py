"""YAML scenario scripts for the quorum simulator.

A script is either a bare list of events or a mapping with simulator
settings and an ``events`` list.  Every event has ``at`` and ``action``;
the remaining keys are the action's parameters.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

import yaml

from ..core import ChainConfig
from ..errors import ConfigError, ScriptError
from .quorum import ScriptEvent, SimConfig

_SETTINGS = ("n_nodes", "seed", "latency", "heartbeat_interval", "users", "duration", "view_timeout")


def parse_events(raw: Any) -> tuple[ScriptEvent, ...]:
    if not isinstance(raw, list):
        raise ScriptError("events must be a list")
    events = []
    for item in raw:
        if not isinstance(item, dict) or "at" not in item or "action" not in item:
            raise ScriptError(f"event needs 'at' and 'action': {item!r}")
        params = {k: v for k, v in item.items() if k not in ("at", "action")}
        if isinstance(params.get("params"), dict):
            params = {**params.pop("params"), **params}
        events.append(ScriptEvent(item["at"], str(item["action"]), params))
    return tuple(events)


def load_scenario(source: str | Path | dict | list, **overrides) -> SimConfig:
    """Build a SimConfig from YAML text, a file path, or parsed data."""
    data = source
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).exists()):
        data = Path(source).read_text()
    if isinstance(data, str):
        try:
            data = yaml.safe_load(data)
        except yaml.YAMLError as exc:
            raise ScriptError(f"malformed scenario: {exc}") from exc
    if isinstance(data, list):
        data = {"events": data}
    if not isinstance(data, dict):
        raise ScriptError("scenario must be a list of events or a mapping")
    unknown = set(data) - set(_SETTINGS) - {"events", "chain"}
    if unknown:
        raise ScriptError(f"unknown scenario keys: {sorted(unknown)}")
    kwargs = {k: data[k] for k in _SETTINGS if k in data}
    if "latency" in kwargs:
        kwargs["latency"] = tuple(kwargs["latency"])
    if "users" in kwargs:
        kwargs["users"] = tuple(kwargs["users"])
    try:
        if "chain" in data:
            kwargs["chain"] = ChainConfig.from_mapping(data["chain"])
    except ConfigError as exc:
        raise ScriptError(f"bad chain settings: {exc}") from exc
    kwargs["script"] = parse_events(data.get("events", []))
    kwargs.update(overrides)
    try:
        return SimConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ScriptError(str(exc)) from exc
