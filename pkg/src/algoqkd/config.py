"""Flat ``key = value`` run configuration.

Example::

    # BB84 run
    n = 1024
    m = 16
    p = 0.0
    epsilon = 0.05
    delta = 0.05
    code_seed = 7          # or: code_file = code.txt (relative to this file)
    pool_bits = 100000
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .lincode import CodeRequirement, LinearCode, construct_code, read_code
from .protocol import DEFAULT_RECONCILE_CONST, ConfigError, ProtocolConfig

_TYPES = {
    "n": int, "m": int, "p": float, "epsilon": float, "delta": float,
    "code_seed": int, "code_file": str, "code_max_attempts": int,
    "channel_mode": str, "noise": float, "reconcile_const": int, "pool_bits": int,
}
_REQUIRED = ("n", "p", "epsilon", "delta")


def parse_config_text(text: str) -> dict:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _TYPES[key](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    missing = [k for k in _REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    if "code_file" not in values and "m" not in values:
        raise ConfigError("give either code_file or m (with optional code_seed)")
    return values


@dataclass(frozen=True)
class RunSettings:
    template: ProtocolConfig  # seed is replaced per session
    pool_bits: int
    values: dict


def load_run_settings(path: str | Path) -> RunSettings:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    values = parse_config_text(text)
    code = _load_code(values, path.parent)
    template = ProtocolConfig(
        n=values["n"], p=values["p"], epsilon=values["epsilon"], delta=values["delta"],
        code=code, seed=0, channel_mode=values.get("channel_mode", "per_qubit"),
        noise=values.get("noise", 0.0),
        reconcile_const=values.get("reconcile_const", DEFAULT_RECONCILE_CONST),
    )
    template.validate()
    return RunSettings(template, values.get("pool_bits", 10**9), values)


def _load_code(values: dict, base: Path) -> LinearCode:
    if "code_file" in values:
        code_path = base / values["code_file"]
        try:
            return read_code(code_path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read code file {code_path}: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"invalid code file {code_path}: {exc}") from exc
    try:
        req = CodeRequirement.for_protocol(values["n"], values["m"], values["p"],
                                           values["epsilon"])
        return construct_code(req, values.get("code_seed", 0),
                              values.get("code_max_attempts", 1000))
    except (RuntimeError, ValueError) as exc:
        raise ConfigError(f"code construction failed: {exc}") from exc
