"""
Simulation configuration for the IRS multiple-access simulator

SimConfig is a frozen pydantic tree. On disk it is a flat `key = value`
file with '#' comments; every key is optional and defaults to the
published macro-cell scenario (two users, 200 reflectors, 16 antennas).
"""
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    FiniteFloat,
    ValidationError,
    ValidationInfo,
    field_validator,
)

from tools.errors import ConfigError


class Scheme(str, Enum):
    TDMA_IRS = "tdma_irs"
    FDMA_IRS = "fdma_irs"
    NOMA_IRS = "noma_irs"
    TDMA_NOIRS = "tdma_noirs"
    FDMA_NOIRS = "fdma_noirs"
    NOMA_NOIRS = "noma_noirs"


class AidedUserPolicy(str, Enum):
    WEAKEST_DIRECT = "weakest_direct"
    STRONGEST_DIRECT = "strongest_direct"
    FIXED_INDEX = "fixed_index"
    NEAREST_IRS = "nearest_irs"


class PowerPolicy(str, Enum):
    INVERSE_GAIN = "inverse_gain"
    FIXED_SPLIT = "fixed_split"


DEFAULT_SCHEMES = (
    Scheme.TDMA_NOIRS,
    Scheme.NOMA_NOIRS,
    Scheme.FDMA_IRS,
    Scheme.TDMA_IRS,
    Scheme.NOMA_IRS,
)


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class Point(_Frozen):
    x: FiniteFloat = 0.0
    y: FiniteFloat = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


class Square(_Frozen):
    """Axis-aligned square given by its lower-left corner and side (m)"""
    x: FiniteFloat = 0.0
    y: FiniteFloat = 0.0
    side: FiniteFloat = Field(default=300.0, gt=0)

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        return (
            (points[:, 0] >= self.x) & (points[:, 0] <= self.x + self.side)
            & (points[:, 1] >= self.y) & (points[:, 1] <= self.y + self.side)
        )


class Geometry(_Frozen):
    bs_position: Point = Point(x=0.0, y=0.0)
    irs_position: Point = Point(x=375.0, y=375.0)
    center_area: Square = Square(x=0.0, y=0.0, side=300.0)
    edge_area: Square = Square(x=250.0, y=250.0, side=250.0)


class PathLossParams(_Frozen):
    """Three-slope COST-Hata parameters; break points in km"""
    p0_db: FiniteFloat = 140.72
    x0_km: FiniteFloat = Field(default=0.01, gt=0)
    x1_km: FiniteFloat = Field(default=0.05, gt=0)
    sigma_sd_db: FiniteFloat = Field(default=8.0, ge=0)

    @field_validator("x1_km")
    @classmethod
    def _break_points_ordered(cls, value: float, info: ValidationInfo) -> float:
        x0 = info.data.get("x0_km")
        if x0 is not None and not x0 < value:
            raise ValueError(f"second break point must exceed the first (x0_km={x0})")
        return value


class BsIrsLinkParams(_Frozen):
    l0_db: FiniteFloat = -30.0
    alpha: FiniteFloat = Field(default=2.0, gt=0)
    rician_factor: float = Field(default=5.0, ge=0)


class SimConfig(_Frozen):
    n_users: int = Field(default=2, ge=1)
    n_reflectors: int = Field(default=200, ge=0)
    n_bs_antennas: int = Field(default=16, ge=1)
    pd_watts: FiniteFloat = Field(default=20.0, gt=0)
    bw_hz: FiniteFloat = Field(default=20e6, gt=0)
    t0_kelvin: FiniteFloat = Field(default=290.0, gt=0)
    nf_db: FiniteFloat = 9.0
    drops: int = Field(default=10000, ge=1)
    ao_iterations: int = Field(default=3, ge=1)
    ao_tolerance: Optional[float] = Field(default=None, gt=0)
    base_seed: int = Field(default=0, ge=0)
    geometry: Geometry = Geometry()
    pathloss: PathLossParams = PathLossParams()
    bs_irs: BsIrsLinkParams = BsIrsLinkParams()
    los_aod_rad: Optional[FiniteFloat] = None
    los_aoa_rad: Optional[FiniteFloat] = None
    aided_user_policy: AidedUserPolicy = AidedUserPolicy.WEAKEST_DIRECT
    aided_user_index: int = Field(default=0, ge=0)
    power_policy: PowerPolicy = PowerPolicy.INVERSE_GAIN
    noma_weak_share: float = Field(default=0.8, gt=0.5, lt=1.0)
    schemes: Tuple[Scheme, ...] = DEFAULT_SCHEMES

    @field_validator("schemes")
    @classmethod
    def _schemes_unique(cls, value: Tuple[Scheme, ...]) -> Tuple[Scheme, ...]:
        if not value:
            raise ValueError("at least one scheme is required")
        if len(set(value)) != len(value):
            raise ValueError("schemes must not repeat")
        return value

    @field_validator("aided_user_index")
    @classmethod
    def _aided_index_in_range(cls, value: int, info: ValidationInfo) -> int:
        k = info.data.get("n_users")
        if info.data.get("aided_user_policy") == AidedUserPolicy.FIXED_INDEX and k is not None and value >= k:
            raise ValueError(f"fixed aided user index must be below users ({k})")
        return value

    @field_validator("power_policy")
    @classmethod
    def _split_needs_two_users(cls, value: PowerPolicy, info: ValidationInfo) -> PowerPolicy:
        k = info.data.get("n_users")
        if value == PowerPolicy.FIXED_SPLIT and k is not None and k != 2:
            raise ValueError(f"fixed_split power allocation needs exactly two users, got {k}")
        return value


# Flat config key -> attribute path inside SimConfig (file order)
FLAT_KEYS: Dict[str, Tuple[str, ...]] = {
    "users": ("n_users",),
    "reflectors": ("n_reflectors",),
    "bs_antennas": ("n_bs_antennas",),
    "pd_watts": ("pd_watts",),
    "bandwidth_hz": ("bw_hz",),
    "temperature_k": ("t0_kelvin",),
    "noise_figure_db": ("nf_db",),
    "drops": ("drops",),
    "ao_iterations": ("ao_iterations",),
    "ao_tolerance": ("ao_tolerance",),
    "seed": ("base_seed",),
    "schemes": ("schemes",),
    "aided_user_policy": ("aided_user_policy",),
    "aided_user_index": ("aided_user_index",),
    "power_policy": ("power_policy",),
    "noma_weak_share": ("noma_weak_share",),
    "bs_x": ("geometry", "bs_position", "x"),
    "bs_y": ("geometry", "bs_position", "y"),
    "irs_x": ("geometry", "irs_position", "x"),
    "irs_y": ("geometry", "irs_position", "y"),
    "center_x": ("geometry", "center_area", "x"),
    "center_y": ("geometry", "center_area", "y"),
    "center_side": ("geometry", "center_area", "side"),
    "edge_x": ("geometry", "edge_area", "x"),
    "edge_y": ("geometry", "edge_area", "y"),
    "edge_side": ("geometry", "edge_area", "side"),
    "p0_db": ("pathloss", "p0_db"),
    "x0_km": ("pathloss", "x0_km"),
    "x1_km": ("pathloss", "x1_km"),
    "shadow_sigma_db": ("pathloss", "sigma_sd_db"),
    "l0_db": ("bs_irs", "l0_db"),
    "pathloss_exponent": ("bs_irs", "alpha"),
    "rician_factor": ("bs_irs", "rician_factor"),
    "los_aod_rad": ("los_aod_rad",),
    "los_aoa_rad": ("los_aoa_rad",),
}

_KEYS_BY_PATH = {path: key for key, path in FLAT_KEYS.items()}
_OPTIONAL_KEYS = {"ao_tolerance", "los_aod_rad", "los_aoa_rad"}


def _convert(key: str, raw: str) -> Any:
    if key in _OPTIONAL_KEYS and raw.lower() in ("", "none"):
        return None
    if key == "schemes":
        return [item.strip() for item in raw.split(",") if item.strip()]
    return raw


def _set_path(tree: Dict[str, Any], path: Tuple[str, ...], value: Any):
    node = tree
    for part in path[:-1]:
        node = node.setdefault(part, {})
    node[path[-1]] = value


def _key_for_location(loc: Tuple[Any, ...]) -> Optional[str]:
    # Longest attribute-path prefix that names a flat key
    for end in range(len(loc), 0, -1):
        key = _KEYS_BY_PATH.get(tuple(str(part) for part in loc[:end]))
        if key is not None:
            return key
    return None


def _parse_entries(text: str) -> Dict[str, Tuple[str, str]]:
    entries: Dict[str, Tuple[str, str]] = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=str(number))
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key not in FLAT_KEYS:
            raise ConfigError("unknown key", key=key, line=str(number))
        if key in entries:
            raise ConfigError("duplicate key", key=key, line=str(number))
        entries[key] = (value, str(number))
    return entries


def _parse_overrides(overrides: Sequence[str]) -> Dict[str, Tuple[str, str]]:
    entries: Dict[str, Tuple[str, str]] = {}
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}' is not key=value", line="override")
        key, value = (part.strip() for part in item.split("=", 1))
        key = key.lower()
        if key not in FLAT_KEYS:
            raise ConfigError("unknown key", key=key, line="override")
        entries[key] = (value, "override")
    return entries


def parse_config(text: str, overrides: Optional[Sequence[str]] = None) -> SimConfig:
    """
    Parse flat `key = value` text into a fully resolved SimConfig

    Args:
        text: Config file contents; '#' starts a comment
        overrides: Extra `key=value` entries applied after the file

    Returns:
        SimConfig with defaults applied for every missing key
    """
    entries = _parse_entries(text)
    entries.update(_parse_overrides(overrides or []))

    # Entries overlay the full default tree; a nested key keeps its siblings
    tree: Dict[str, Any] = SimConfig().model_dump()
    for key, (raw, _) in entries.items():
        _set_path(tree, FLAT_KEYS[key], _convert(key, raw))

    try:
        return SimConfig.model_validate(tree)
    except ValidationError as exc:
        error = exc.errors()[0]
        key = _key_for_location(error["loc"])
        line = entries[key][1] if key in entries else "default"
        raise ConfigError(error["msg"], key=key, line=line) from exc


def load_config(path: Optional[str] = None, overrides: Optional[Sequence[str]] = None) -> SimConfig:
    """Read a config file (or only the defaults) and apply overrides"""
    text = Path(path).read_text(encoding="utf-8") if path else ""
    return parse_config(text, overrides)


def _format_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, tuple):
        return ",".join(_format_value(item) for item in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_to_flat(cfg: SimConfig) -> Dict[str, str]:
    """Flat key -> rendered value mapping, in file order"""
    flat = {}
    for key, path in FLAT_KEYS.items():
        node: Any = cfg
        for part in path:
            node = getattr(node, part)
        flat[key] = _format_value(node)
    return flat


def render_config(cfg: SimConfig) -> str:
    """Render a config file that parses back to the identical SimConfig"""
    lines: List[str] = ["# IRS multiple-access simulation config"]
    lines.extend(f"{key} = {value}" for key, value in config_to_flat(cfg).items())
    return "\n".join(lines) + "\n"
