"""Payload schemas for data entries, written as YAML in JSON-Schema form."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import jsonschema
import yaml

from .errors import SchemaViolation


class EntrySchema:
    def __init__(self, document: dict):
        try:
            jsonschema.Draft202012Validator.check_schema(document)
        except jsonschema.SchemaError as exc:
            raise SchemaViolation(f"invalid schema: {exc.message}", "bad-schema") from exc
        self.document = document
        self._validator = jsonschema.Draft202012Validator(document)

    @classmethod
    def load(cls, source: str | Path) -> "EntrySchema":
        text = Path(source).read_text() if Path(source).exists() else str(source)
        try:
            document = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise SchemaViolation(f"unreadable schema: {exc}", "bad-schema") from exc
        if not isinstance(document, dict):
            raise SchemaViolation("schema must be a mapping", "bad-schema")
        return cls(document)

    def validate(self, payload: Any) -> None:
        error = jsonschema.exceptions.best_match(self._validator.iter_errors(payload))
        if error is not None:
            where = "/".join(map(str, error.absolute_path)) or "payload"
            raise SchemaViolation(f"{where}: {error.message}", "schema-violation")


def parse_payload(text: str) -> Any:
    """Command-line payloads are YAML, so ``login`` and ``{event: login}`` both work."""
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def encode_payload(value: Any) -> bytes:
    if isinstance(value, bytes):
        return value
    if isinstance(value, str):
        return value.encode("utf-8")
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
