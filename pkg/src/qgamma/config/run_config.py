"""
Declarative run configuration.

A run is described by a JSON document. Every key is validated before any
computation starts, unknown keys are rejected, and errors name the dotted
path of the offending key.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from . import settings

COMMANDS: List[str] = [
    "check-k",
    "landscape",
    "degree",
    "verify-bubble",
    "solve",
    "sweep",
    "report",
]

TOP_LEVEL_KEYS = {
    "command",
    "params",
    "K",
    "numerics",
    "epsilons",
    "seed",
    "output_dir",
    "threads",
}
PARAMS_KEYS = {"n", "gamma"}
K_KEYS = {"builtin", "options", "expression", "eta"}
NUMERICS_TYPES: Dict[str, Any] = {
    "L": int,
    "tol": float,
    "quad_step": float,
    "box": list,
    "resolution": int,
    "mu_min": float,
    "omega_radius": float,
    "max_depth": int,
    "epsilon": float,
    "seed_bubble": dict,
    "warm_start": bool,
    "toon": bool,
}
SEED_BUBBLE_KEYS = {"mu", "xi"}


@dataclass
class KSpec:
    """Which curvature perturbation to use: a library entry or an expression."""

    builtin: Optional[str] = None
    options: Dict[str, Any] = field(default_factory=dict)
    expression: Optional[str] = None
    eta: Optional[float] = None

    def describe(self) -> Dict[str, Any]:
        if self.builtin is not None:
            return {"builtin": self.builtin, "options": dict(sorted(self.options.items()))}
        return {"expression": self.expression, "eta": self.eta}


@dataclass
class RunConfig:
    """Fully validated run description."""

    command: str
    n: int
    gamma: float
    K: KSpec
    numerics: Dict[str, Any] = field(default_factory=dict)
    epsilons: List[float] = field(default_factory=list)
    seed: int = 0
    output_dir: str = settings.OUTPUT_DIR
    threads: int = settings.THREADS

    def numeric(self, key: str, default: Any = None) -> Any:
        """Return a numerics option or its default."""
        return self.numerics.get(key, default)


def _reject_unknown(data: Dict[str, Any], allowed, prefix: str) -> None:
    from ..utils.exceptions import ConfigurationError

    for key in sorted(data):
        if key not in allowed:
            path = f"{prefix}{key}"
            raise ConfigurationError(f"Unknown config key: {path}", path)


def _coerce(value: Any, kind: Any, path: str) -> Any:
    from ..utils.exceptions import ConfigurationError

    if kind is bool:
        if isinstance(value, bool):
            return value
    elif kind is int:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif kind is float:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
    elif isinstance(value, kind):
        return value
    raise ConfigurationError(
        f"Config key {path} must be of type {kind.__name__}, got {type(value).__name__}",
        path,
    )


def build_run_config(
    data: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None
) -> RunConfig:
    """
    Validate a raw configuration mapping and build a RunConfig.

    Args:
        data: Parsed JSON document
        overrides: Values from command-line flags; None entries are ignored

    Returns:
        Validated RunConfig

    Raises:
        ConfigurationError: On unknown keys, missing keys or bad values
    """
    from ..utils.exceptions import ConfigurationError

    if not isinstance(data, dict):
        raise ConfigurationError("Config root must be a JSON object", "<root>")

    merged: Dict[str, Any] = json.loads(json.dumps(data))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key in ("n", "gamma"):
            merged.setdefault("params", {})[key] = value
        elif key in NUMERICS_TYPES:
            merged.setdefault("numerics", {})[key] = value
        elif key == "K":
            merged["K"] = value
        else:
            merged[key] = value

    _reject_unknown(merged, TOP_LEVEL_KEYS, "")

    command = merged.get("command")
    if command not in COMMANDS:
        raise ConfigurationError(
            f"Config key command must be one of {', '.join(COMMANDS)}", "command"
        )

    params = merged.get("params", {})
    if not isinstance(params, dict):
        raise ConfigurationError("Config key params must be an object", "params")
    _reject_unknown(params, PARAMS_KEYS, "params.")
    if command != "report":
        for key in ("n", "gamma"):
            if key not in params:
                raise ConfigurationError(f"Missing config key params.{key}", f"params.{key}")
    n = _coerce(params.get("n", 1), int, "params.n")
    gamma = _coerce(params.get("gamma", 0.25), float, "params.gamma")

    k_raw = merged.get("K", {"builtin": "two-bump"})
    if isinstance(k_raw, str):
        k_raw = {"builtin": k_raw}
    if not isinstance(k_raw, dict):
        raise ConfigurationError("Config key K must be an object or a name", "K")
    _reject_unknown(k_raw, K_KEYS, "K.")
    if ("builtin" in k_raw) == ("expression" in k_raw):
        raise ConfigurationError(
            "Config key K needs exactly one of K.builtin or K.expression", "K"
        )
    options = k_raw.get("options", {})
    if not isinstance(options, dict):
        raise ConfigurationError("Config key K.options must be an object", "K.options")
    k_spec = KSpec(
        builtin=k_raw.get("builtin"),
        options=options,
        expression=k_raw.get("expression"),
        eta=_coerce(k_raw["eta"], float, "K.eta") if "eta" in k_raw else None,
    )

    numerics_raw = merged.get("numerics", {})
    if not isinstance(numerics_raw, dict):
        raise ConfigurationError("Config key numerics must be an object", "numerics")
    _reject_unknown(numerics_raw, NUMERICS_TYPES, "numerics.")
    numerics = {
        key: _coerce(value, NUMERICS_TYPES[key], f"numerics.{key}")
        for key, value in sorted(numerics_raw.items())
    }
    if "seed_bubble" in numerics:
        _reject_unknown(numerics["seed_bubble"], SEED_BUBBLE_KEYS, "numerics.seed_bubble.")
    if "box" in numerics:
        for i, edge in enumerate(numerics["box"]):
            if not (isinstance(edge, list) and len(edge) == 2 and edge[0] < edge[1]):
                raise ConfigurationError(
                    f"Config key numerics.box[{i}] must be [lo, hi] with lo < hi",
                    f"numerics.box[{i}]",
                )

    epsilons = [
        _coerce(e, float, f"epsilons[{i}]") for i, e in enumerate(merged.get("epsilons", []))
    ]
    if epsilons != sorted(epsilons):
        raise ConfigurationError("Config key epsilons must be sorted ascending", "epsilons")

    threads = _coerce(merged.get("threads", settings.THREADS), int, "threads")
    if threads <= 0:
        raise ConfigurationError("Config key threads must be positive", "threads")

    return RunConfig(
        command=command,
        n=n,
        gamma=gamma,
        K=k_spec,
        numerics=numerics,
        epsilons=epsilons,
        seed=_coerce(merged.get("seed", 0), int, "seed"),
        output_dir=str(merged.get("output_dir", settings.OUTPUT_DIR)),
        threads=threads,
    )


def load_run_config(
    path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None
) -> RunConfig:
    """
    Read and validate a JSON run configuration.

    Raises:
        FileSystemError: If the file cannot be read
        ConfigurationError: If the document is not valid
    """
    from ..utils.exceptions import ConfigurationError, FileSystemError

    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise FileSystemError(f"Failed to read config: {e}", str(path), "read")
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Config is not valid JSON: {e}", "<root>")

    return build_run_config(data, overrides)


__all__ = [
    "COMMANDS",
    "KSpec",
    "RunConfig",
    "build_run_config",
    "load_run_config",
]
