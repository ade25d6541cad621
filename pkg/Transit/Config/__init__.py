"""
Config Layer

One configuration record for every tolerance and knob in the system.

Precedence (lowest to highest):
- Built-in defaults
- TRANSIT_* environment variables (.env is loaded with python-dotenv)
- JSON config file (--config)
- Explicit overrides (CLI flags)

Usage:
    from Transit.Config import load_config

    config = load_config("transit.json", overrides={"pivot_rule": "bland"})
    print(config.tol_feas)
"""

from .settings import (
    TransitConfig,
    ConfigError,
    load_config,
    get_default_config,
)

__all__ = [
    "TransitConfig",
    "ConfigError",
    "load_config",
    "get_default_config",
]
