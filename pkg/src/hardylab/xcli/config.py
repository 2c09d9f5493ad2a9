"""Experiment configuration: one JSON document per experiment."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from ..errors import ParseError
from .parser import parse_lefun

COMMANDS = (
    "classify",
    "decompose",
    "window",
    "pet-reduce",
    "verify-cert",
    "average",
    "weyl",
    "seminorm",
    "recurrence",
    "interval-check",
)
# params entries that name files, resolved against the config's directory
FILE_PARAMS = {"pet-reduce": "family", "verify-cert": "certificate"}


class ConfigError(ValueError):
    pass


def _freeze(x):
    if isinstance(x, list):
        return tuple(_freeze(v) for v in x)
    if isinstance(x, dict):
        return {k: _freeze(v) for k, v in x.items()}
    return x


def _thaw(x):
    if isinstance(x, tuple):
        return [_thaw(v) for v in x]
    if isinstance(x, dict):
        return {k: _thaw(v) for k, v in x.items()}
    return x


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    command: str
    functions: tuple = ()
    system: dict | None = None
    ladder: tuple = ()
    schedule: tuple | None = None
    output: str | None = None
    params: dict = field(default_factory=dict)  # command-specific inputs (observables, frequencies, box, ...)
    base_dir: str | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple(self.functions))
        object.__setattr__(self, "ladder", tuple(int(n) for n in self.ladder))
        if self.schedule is not None:
            object.__setattr__(self, "schedule", tuple(int(h) for h in self.schedule))
        object.__setattr__(self, "system", _freeze(dict(self.system)) if self.system is not None else None)
        object.__setattr__(self, "params", _freeze(dict(self.params)))
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.name, str) or not self.name:
            raise ConfigError("config needs a non-empty name")
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")
        for text in self.functions:
            try:
                parse_lefun(text)
            except ParseError as e:
                raise ConfigError(f"function {text!r} does not parse: {e}") from e
        if any(n < 1 for n in self.ladder):
            raise ConfigError("ladder entries must be positive")
        if any(b <= a for a, b in zip(self.ladder, self.ladder[1:])):
            raise ConfigError("ladder must be strictly increasing")
        key = FILE_PARAMS.get(self.command)
        if key is not None:
            ref = self.params.get(key)
            if ref is None:
                raise ConfigError(f"{self.command} needs params.{key}")
            if isinstance(ref, str) and not os.path.exists(self.resolve(ref)):
                raise ConfigError(f"referenced file {ref!r} does not exist")

    def resolve(self, path: str) -> str:
        if os.path.isabs(path) or self.base_dir is None:
            return path
        return os.path.join(self.base_dir, path)

    def to_json(self) -> dict:
        out = {"name": self.name, "command": self.command, "functions": list(self.functions)}
        if self.system is not None:
            out["system"] = _thaw(self.system)
        out["ladder"] = list(self.ladder)
        if self.schedule is not None:
            out["schedule"] = list(self.schedule)
        if self.output is not None:
            out["output"] = self.output
        if self.params:
            out["params"] = _thaw(self.params)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    @staticmethod
    def from_json(d: dict, base_dir: str | None = None) -> ExperimentConfig:
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {"name", "command", "functions", "system", "ladder", "schedule", "output", "params"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(extra))}")
        for key in ("name", "command"):
            if key not in d:
                raise ConfigError(f"config is missing {key!r}")
        return ExperimentConfig(
            name=d["name"],
            command=d["command"],
            functions=d.get("functions", ()),
            system=d.get("system"),
            ladder=d.get("ladder", ()),
            schedule=d.get("schedule"),
            output=d.get("output"),
            params=d.get("params", {}),
            base_dir=base_dir,
        )

    @staticmethod
    def loads(text: str, base_dir: str | None = None) -> ExperimentConfig:
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from e
        return ExperimentConfig.from_json(d, base_dir)

    @staticmethod
    def load(path: str) -> ExperimentConfig:
        with open(path) as fh:
            return ExperimentConfig.loads(fh.read(), os.path.dirname(os.path.abspath(path)))

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())
