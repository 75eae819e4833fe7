from __future__ import annotations

import json
import logging
import os
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

try:
    from .config_model import (
        CONFIG_VERSION,
        EncodingSection,
        ExperimentConfig,
        NeuronSection,
        OutputSection,
        ReservoirSection,
        SweepSection,
    )
except ImportError:
    from config_model import (  # type: ignore[no-redef]
        CONFIG_VERSION,
        EncodingSection,
        ExperimentConfig,
        NeuronSection,
        OutputSection,
        ReservoirSection,
        SweepSection,
    )


_LOGGER = logging.getLogger(__name__)


class ConfigError(ValueError):
    """A config value has the wrong type; `field` is the dotted path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def default_config_path() -> Path:
    """The documented defaults file shipped next to the modules."""

    return Path(__file__).resolve().parent / "config.json"


def _section(data: Dict[str, Any], name: str) -> Dict[str, Any]:
    raw = data.get(name, {})
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError(name, "section must be an object")
    return raw


def _int(section: Dict[str, Any], key: str, default: int, path: str) -> int:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}.{key}", f"expected an integer, got {value!r}")
    return value


def _float(section: Dict[str, Any], key: str, default: Optional[float], path: str) -> Optional[float]:
    value = section.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {value!r}")
    return float(value)


def _bool(section: Dict[str, Any], key: str, default: bool, path: str) -> bool:
    value = section.get(key, default)
    if not isinstance(value, bool):
        raise ConfigError(f"{path}.{key}", f"expected true/false, got {value!r}")
    return value


def _str(section: Dict[str, Any], key: str, default: str, path: str) -> str:
    value = section.get(key, default)
    if not isinstance(value, str):
        raise ConfigError(f"{path}.{key}", f"expected a string, got {value!r}")
    return value


def _list(section: Dict[str, Any], key: str, default: List[Any], path: str, kind: type) -> List[Any]:
    value = section.get(key, default)
    if not isinstance(value, list):
        raise ConfigError(f"{path}.{key}", f"expected a list, got {value!r}")
    out: List[Any] = []
    for idx, item in enumerate(value):
        if kind is float and isinstance(item, (int, float)) and not isinstance(item, bool):
            out.append(float(item))
        elif kind is int and isinstance(item, int) and not isinstance(item, bool):
            out.append(item)
        elif kind is str and isinstance(item, str):
            out.append(item)
        else:
            raise ConfigError(f"{path}.{key}[{idx}]", f"expected {kind.__name__}, got {item!r}")
    return out


def _refs(section: Dict[str, Any], path: str) -> Optional[List[List[float]]]:
    value = section.get("refs")
    if value is None:
        return None
    if not isinstance(value, list):
        raise ConfigError(f"{path}.refs", "expected a list of [time, amplitude] pairs")
    out: List[List[float]] = []
    for idx, pair in enumerate(value):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or isinstance(pair[0], bool)
            or not isinstance(pair[0], int)
            or not isinstance(pair[1], (int, float))
        ):
            raise ConfigError(f"{path}.refs[{idx}]", f"expected [time, amplitude], got {pair!r}")
        out.append([pair[0], float(pair[1])])
    return out


def dict_to_config(data: Dict[str, Any]) -> ExperimentConfig:
    """Build a config from a parsed JSON object.

    Missing keys take the dataclass defaults and unknown keys are ignored;
    a present key with the wrong type raises ConfigError.
    """

    if not isinstance(data, dict) or not data:
        return ExperimentConfig()

    config_version = data.get("config_version", CONFIG_VERSION)
    if not isinstance(config_version, int):
        config_version = CONFIG_VERSION

    n_raw = _section(data, "neuron")
    n_def = NeuronSection()
    neuron = NeuronSection(
        variant=_str(n_raw, "variant", n_def.variant, "neuron"),
        theta=float(_float(n_raw, "theta", n_def.theta, "neuron") or 0.0),
        beta=float(_float(n_raw, "beta", n_def.beta, "neuron") or 0.0),
        t_r=_int(n_raw, "t_r", n_def.t_r, "neuron"),
    )

    r_raw = _section(data, "reservoir")
    r_def = ReservoirSection()
    reservoir = ReservoirSection(
        n_neurons=_int(r_raw, "n_neurons", r_def.n_neurons, "reservoir"),
        horizon=_int(r_raw, "horizon", r_def.horizon, "reservoir"),
        include_self_connections=_bool(
            r_raw, "include_self_connections", r_def.include_self_connections, "reservoir"
        ),
    )

    e_raw = _section(data, "encoding")
    e_def = EncodingSection()
    encoding = EncodingSection(
        variant=_str(e_raw, "variant", e_def.variant, "encoding"),
        times=_list(e_raw, "times", e_def.times, "encoding", int),
        amp0=_float(e_raw, "amp0", None, "encoding"),
        amp1=_float(e_raw, "amp1", None, "encoding"),
        refs=_refs(e_raw, "encoding"),
    )

    s_raw = _section(data, "sweep")
    s_def = SweepSection()
    sweep = SweepSection(
        runs=_int(s_raw, "runs", s_def.runs, "sweep"),
        seed=_int(s_raw, "seed", s_def.seed, "sweep"),
        variants=_list(s_raw, "variants", s_def.variants, "sweep", str),
        betas=_list(s_raw, "betas", s_def.betas, "sweep", float),
        refractory_times=_list(s_raw, "refractory_times", s_def.refractory_times, "sweep", int),
        workers=_int(s_raw, "workers", s_def.workers, "sweep"),
    )

    o_raw = _section(data, "output")
    output = OutputSection(out_dir=_str(o_raw, "out_dir", OutputSection().out_dir, "output"))

    return ExperimentConfig(
        config_version=config_version,
        neuron=neuron,
        reservoir=reservoir,
        encoding=encoding,
        sweep=sweep,
        output=output,
    )


def config_to_dict(config: ExperimentConfig) -> Dict[str, Any]:
    data = asdict(config)
    # Unset encoding overrides are omitted so the file stays minimal.
    enc = data.get("encoding")
    if isinstance(enc, dict):
        for key in ("amp0", "amp1", "refs"):
            if enc.get(key) is None:
                enc.pop(key, None)
    return data


def load_config(path: Optional[Union[str, Path]] = None) -> ExperimentConfig:
    """Load a JSON config file; `None` loads the shipped defaults.

    A missing defaults file yields dataclass defaults. Malformed JSON or
    mistyped values raise ConfigError.
    """

    target = Path(path) if path is not None else default_config_path()
    if path is None and not target.exists():
        return ExperimentConfig()

    try:
        raw = target.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(str(target), f"cannot read config file: {e}") from e

    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ConfigError(
            str(target), f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}"
        ) from e

    config = dict_to_config(data or {})
    _LOGGER.debug("Loaded config from %s", str(target))
    return config


def atomic_write_text(path: Union[str, Path], text: str) -> None:
    """Write `text` beside `path` as `.tmp`, then rename it into place."""

    target = Path(path)
    tmp = Path(str(target) + ".tmp")

    try:
        target.parent.mkdir(parents=True, exist_ok=True)
    except Exception:
        # If directory creation fails, let write_text raise a clearer error.
        pass

    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, target)


def save_config(config: ExperimentConfig, path: Union[str, Path]) -> None:
    atomic_write_text(path, json.dumps(config_to_dict(config), indent=2, sort_keys=True) + "\n")
