"""Flat ``section.key = value`` experiment configs.

Lines are ``key = value``; ``#`` starts a comment.  A ``[section]`` header
lets later keys drop their ``section.`` prefix.  Unknown keys are errors.
"""
from dataclasses import fields, replace
from pathlib import Path

from .core import ExperimentConfig
from .environments import EnvSpec
from .errors import ConfigError, DataError
from .models import ModelSpec
from .policies import PolicySpec

SECTIONS = {"env": EnvSpec, "model": ModelSpec, "policy": PolicySpec}
RUN_KEYS = {"T": int, "seed": int, "retrain_every": int, "epochs_per_fit": int}
# field types that the dataclass annotations leave ambiguous (None defaults)
TYPES = {
    "env.n": int, "env.K": int, "env.noise_scale": float, "env.data_path": str, "env.exact_balance": bool,
    "env.dim": int, "env.kind": str,
    "model.kind": str, "model.hidden": int, "model.dropout": float, "model.batch_size": int,
    "model.ridge_lambda": float, "model.learning_rate": float, "model.trunk": str, "model.precision": str,
    "policy.kind": str, "policy.epsilon0": float, "policy.decay_scale": float, "policy.posterior_samples": int,
}
TYPES.update({f"run.{k}": v for k, v in RUN_KEYS.items()})
KNOWN_KEYS = list(TYPES)
NULLABLE = {"env.data_path"}


def _coerce(key, raw):
    kind = TYPES[key]
    if raw == "" and key in NULLABLE:
        return None
    try:
        if kind is bool:
            low = raw.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError
        if kind is int:
            return int(raw, 0)
        return kind(raw)
    except ValueError:
        domain = {bool: "true/false", int: "an integer", float: "a number", str: "a string"}[kind]
        raise ConfigError(f"{key}: expected {domain}, got {raw!r}") from None


def parse_config_text(text, source="<config>"):
    """Parse config text into ``{dotted_key: value}`` (only keys present in the text)."""
    values = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in SECTIONS and section != "run":
                raise ConfigError(f"{source}:{lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if section and "." not in key:
            key = f"{section}.{key}"
        if key not in TYPES:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw)
    return values


def build_config(values):
    """Turn a ``{dotted_key: value}`` mapping into a validated ``ExperimentConfig``."""
    unknown = [k for k in values if k not in TYPES]
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r}")
    parts = {}
    for section, cls in SECTIONS.items():
        kwargs = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith(section + ".")}
        parts[section] = cls(**kwargs)
    run = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith("run.")}
    return ExperimentConfig(env=parts["env"], model=parts["model"], policy=parts["policy"], **run)


def load_config(path, **overrides):
    """Read a config file; ``overrides`` use dotted keys with ``.`` replaced by ``__``."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc.strerror}") from None
    values = parse_config_text(text, str(path))
    for k, v in overrides.items():
        if v is not None:
            values[k.replace("__", ".")] = v
    return build_config(values)


def _show(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value) if isinstance(value, float) else str(value)


def format_config(config):
    """Every effective key, one per line; the output parses back to an equal config."""
    lines = []
    for section, cls in SECTIONS.items():
        spec = getattr(config, section)
        lines.append(f"[{section}]")
        lines += [f"{f.name} = {_show(getattr(spec, f.name))}" for f in fields(cls)]
        lines.append("")
    lines.append("[run]")
    lines += [f"{k} = {_show(getattr(config, k))}" for k in RUN_KEYS]
    return "\n".join(lines) + "\n"


def with_overrides(config, seed=None, retrain_every=None):
    changes = {k: v for k, v in (("seed", seed), ("retrain_every", retrain_every)) if v is not None}
    return replace(config, **changes) if changes else config
