"""Plain-text ``key = value`` experiment configuration.

Blank lines and lines starting with ``#`` are ignored.  Unknown keys are
rejected, and every resolution constraint is checked before any compute.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from viscid.assembly import BETA_MIN
from viscid.parabolic import ResolutionError, check_resolution

EXPERIMENTS = ("rate", "holder", "universal", "residual", "cross_term", "audit")
SYSTEMS = ("burgers", "burgers-transport")

# nu sweeps used when the config does not give one
DEFAULT_NU = {
    "rate": (1e-2, 10**-2.5, 1e-3, 10**-3.5, 1e-4),
    "holder": (1e-2, 10**-2.5, 1e-3, 10**-3.5, 1e-4),
    "universal": (1e-2, 1e-3, 1e-4),
    "residual": (1e-2, 1e-3, 1e-4),
    "cross_term": (3e-2, 1e-2, 3e-3, 1e-3),
    "audit": (),
}


class ConfigError(ValueError):
    """Malformed or invalid configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    system: str = "burgers"
    b_cross: float = 1.0
    nu_list: tuple[float, ...] = ()
    t0: float = -1.0
    t_end: float = 0.0
    x_lo: float = -2.0
    x_hi: float = 2.0
    # dx = dx_scale * nu ** dx_power
    dx_scale: float = 0.2
    dx_power: float = 0.75
    cfl_adv: float = 0.4
    cfl_diff: float = 0.4
    n_store: int = 41
    K: int = 1
    L: int = 0
    beta: float = 0.47
    cutoff_R: float = 0.0  # 0 selects the data-contour radius
    matched: bool = True
    holder_alphas: tuple[float, ...] = (0.25, 1.0 / 3.0)
    holder_window: float = 0.5
    inner_T_min: float = -100.0
    inner_X_box: float = 200.0
    inner_dX: float = 0.1
    universal_box: tuple[float, float, float, float] = (-1.0, 0.0, -3.0, 3.0)
    residual_point: tuple[float, float] = (-0.5, 0.3)
    residual_h: float = 1e-4
    output_dir: str = "results"

    def dx(self, nu: float) -> float:
        return self.dx_scale * nu**self.dx_power

    @property
    def measures_undiffused(self) -> bool:
        return self.experiment == "cross_term"

    def to_text(self) -> str:
        """Normalized ``key = value`` text; ``parse_config`` inverts it."""
        lines = []
        for f in fields(self):
            lines.append(f"{f.name} = {_format(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return asdict(self)


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(_format(v) for v in value)
    return str(value)


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_floats(text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.strip().strip('"').split(",") if p.strip()]
    return tuple(float(p) for p in parts)


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _convert(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    if kind == "str":
        return raw.strip('"')
    if kind == "bool":
        return _parse_bool(raw)
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind.startswith("tuple"):
        return _parse_floats(raw)
    raise AssertionError(f"unhandled field type {kind}")


def parse_config(source: str | Path, experiment: str | None = None) -> ExperimentConfig:
    """Parse a config file path, config text, or a run manifest (``.json``).

    ``experiment`` (from the command line) fills a missing ``experiment``
    key and must agree with it when both are given.
    """
    text = _read_source(source)
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, raw = (s.strip() for s in stripped.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _convert(key, raw)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    if experiment is not None:
        if values.setdefault("experiment", experiment) != experiment:
            raise ConfigError(
                f"config sets experiment = {values['experiment']} but {experiment} was requested"
            )
    if "experiment" not in values:
        raise ConfigError("missing key: experiment")
    cfg = ExperimentConfig(**values)
    cfg = _fill_defaults(cfg, set(values))
    validate(cfg)
    return cfg


def _read_source(source: str | Path) -> str:
    text = str(source)
    if isinstance(source, Path) or (text and "\n" not in text and "=" not in text):
        path = Path(source)
        try:
            raw = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if path.suffix == ".json":
            try:
                return json.loads(raw)["config_text"]
            except (ValueError, KeyError):
                raise ConfigError(f"{path} is not a run manifest") from None
        return raw
    return text


def _fill_defaults(cfg: ExperimentConfig, given: set[str]) -> ExperimentConfig:
    updates: dict[str, object] = {}
    if "nu_list" not in given and cfg.experiment in DEFAULT_NU:
        updates["nu_list"] = DEFAULT_NU[cfg.experiment]
    if cfg.experiment == "cross_term":
        updates.setdefault("system", cfg.system if "system" in given else "burgers-transport")
        if "dx_scale" not in given:
            updates["dx_scale"] = 0.1
        if "dx_power" not in given:
            updates["dx_power"] = 1.0
        if "x_lo" not in given:
            updates["x_lo"] = -0.5
        if "x_hi" not in given:
            updates["x_hi"] = 0.5
    return replace(cfg, **updates) if updates else cfg


def validate(cfg: ExperimentConfig) -> None:
    """Raise ``ConfigError`` naming the first violated constraint."""
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {', '.join(EXPERIMENTS)}")
    if cfg.system not in SYSTEMS:
        raise ConfigError(f"system must be one of {', '.join(SYSTEMS)}")
    if cfg.experiment == "cross_term" and cfg.system != "burgers-transport":
        raise ConfigError("cross_term needs system = burgers-transport")
    if cfg.experiment in ("rate", "holder", "universal", "residual") and cfg.system != "burgers":
        raise ConfigError(f"{cfg.experiment} is defined for system = burgers")
    nus = cfg.nu_list
    if any(not (math.isfinite(v) and v > 0) for v in nus):
        raise ConfigError("nu_list entries must be positive")
    if any(b >= a for a, b in zip(nus, nus[1:])):
        raise ConfigError("nu_list must be strictly decreasing")
    if not cfg.t0 < cfg.t_end <= 0:
        raise ConfigError("need t0 < t_end <= 0")
    if not cfg.x_lo < 0 < cfg.x_hi:
        raise ConfigError("domain must contain the preshock x = 0")
    if not (0 < cfg.cfl_adv <= 1 and 0 < cfg.cfl_diff <= 1):
        raise ConfigError("CFL numbers must lie in (0, 1]")
    if cfg.n_store < 2:
        raise ConfigError("n_store must be at least 2")
    if cfg.K not in (0, 1) or cfg.L != 0:
        raise ConfigError("only K in {0, 1} and L = 0 are supported")
    if not BETA_MIN < cfg.beta < 0.5:
        raise ConfigError("beta must lie strictly inside (6/13, 1/2)")
    if cfg.cutoff_R < 0:
        raise ConfigError("cutoff_R must be positive (or 0 for the contour radius)")
    if any(not 0 < a <= 1 for a in cfg.holder_alphas):
        raise ConfigError("holder_alphas must lie in (0, 1]")
    if not 0 < cfg.holder_window <= min(-cfg.x_lo, cfg.x_hi):
        raise ConfigError("holder_window must fit inside the domain")
    if cfg.inner_T_min > -4 or cfg.inner_X_box < 4 or cfg.inner_dX <= 0:
        raise ConfigError("inner box needs inner_T_min <= -4, inner_X_box >= 4, inner_dX > 0")
    if len(cfg.universal_box) != 4 or len(cfg.residual_point) != 2:
        raise ConfigError("universal_box takes 4 numbers and residual_point takes 2")
    if cfg.residual_h <= 0:
        raise ConfigError("residual_h must be positive")
    if cfg.experiment not in ("residual", "audit"):
        for nu in nus:
            try:
                check_resolution(cfg.dx(nu), nu, cfg.measures_undiffused)
            except ResolutionError as exc:
                raise ConfigError(f"nu = {nu:g}: {exc}") from None
    needed = {"audit": 0, "universal": 2}.get(cfg.experiment, 3)
    if len(nus) < needed:
        raise ConfigError(f"nu_list needs at least {needed} values for {cfg.experiment}")
