"""
====================================================
CONFIG LAYER
====================================================

RESPONSIBILITY:
Hold the single tolerance policy and every tunable knob.

NO numerics.
NO file formats beyond the config file itself.

Every comparison in the solver, the diagram LPs and the verifier reads
its tolerance from a TransitConfig, so the degeneracy handling of a run
can be audited from the header of its output file.
====================================================
"""

import json
import os
from pathlib import Path
from typing import Any, Dict, Literal, Mapping, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError


ENV_PREFIX = "TRANSIT_"


class ConfigError(Exception):
    """Raised when a config file or override cannot be turned into a TransitConfig."""
    pass


class TransitConfig(BaseModel):
    """Effective configuration of a run (immutable)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    tol_feas: float = Field(default=1e-9, gt=0.0, le=1e-3, description="Primal feasibility tolerance")
    tol_opt: float = Field(default=1e-7, gt=0.0, le=1e-2, description="Dual / optimality tolerance")
    pivot_rule: Literal["dantzig", "bland"] = Field(default="dantzig", description="Entering-variable rule")
    refactor_period: int = Field(default=50, ge=1, description="Pivots between basis refactorizations")
    boundary_tol: float = Field(default=1e-6, gt=0.0, description="Scale-aware tolerance for items on cell boundaries")
    breakpoint_coalesce: float = Field(default=1e-10, ge=0.0, description="Breakpoints closer than this are one event")
    enumeration_budget: int = Field(default=10**7, ge=1, description="Max assignments the oracle may enumerate")
    seed: int = Field(default=0, ge=0, description="RNG seed for instance generation")

    def degenerate_limit(self, rows: int) -> int:
        """Consecutive degenerate pivots tolerated before Bland's rule takes over."""
        return 2 * rows


_DEFAULT_CONFIG: Optional[TransitConfig] = None


def get_default_config() -> TransitConfig:
    """Defaults plus TRANSIT_* environment variables, cached for the process."""
    global _DEFAULT_CONFIG
    if _DEFAULT_CONFIG is None:
        _DEFAULT_CONFIG = load_config()
    return _DEFAULT_CONFIG


def _env_values() -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    for name in TransitConfig.model_fields:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw is not None and raw.strip():
            values[name] = raw.strip()
    return values


def load_config(
    path: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    env_file: Optional[str] = None,
) -> TransitConfig:
    """
    Build the effective configuration.

    Args:
        path: Optional JSON file with any subset of TransitConfig fields
        overrides: Explicit values (CLI flags); None entries are ignored
        env_file: .env file to load (defaults to the project root .env)

    Returns:
        Validated, frozen TransitConfig

    Raises:
        ConfigError: unreadable file, unknown key or out-of-range value
    """
    project_root = Path(__file__).resolve().parent.parent.parent
    load_dotenv(env_file or project_root / ".env")

    values: Dict[str, Any] = _env_values()

    if path is not None:
        config_path = Path(path)
        if not config_path.is_file():
            raise ConfigError(f"Config file does not exist: {path}")
        try:
            file_values = json.loads(config_path.read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}, line {e.lineno}: {e.msg}") from e
        if not isinstance(file_values, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
        values.update(file_values)

    if overrides:
        values.update({key: value for key, value in overrides.items() if value is not None})

    try:
        return TransitConfig(**values)
    except ValidationError as e:
        raise ConfigError(str(e)) from e
