import os
import yaml
import json
from typing import Dict, Any, Optional, List
from pathlib import Path
from dataclasses import dataclass, fields
from dotenv import load_dotenv
import logging

logger = logging.getLogger(__name__)

MAX_DEPTH = 12


class ConfigValidationError(Exception):
    """Raised when configuration validation fails"""
    pass


@dataclass
class Settings:
    log_level: str = "INFO"
    log_file: Optional[str] = None
    enable_structured_logging: bool = True
    enable_metrics: bool = False

    # Search Configuration
    search_depth: int = 8
    eps: float = 1e-9
    angle_eps: float = 1e-7
    cmax: int = 100
    tile_cap: int = 10**6
    threads: int = 0

    # Verification Configuration
    verify_depth: int = 8
    conjecture_depth: int = 10
    invariants_depth: int = 5
    realization_max_entry: int = 8

    output_directory: str = "./output"

    def __post_init__(self):
        """Validate settings after initialization"""
        self.validate()

    def validate(self) -> None:
        """
        Validate configuration settings.

        Raises:
            ConfigValidationError: If validation fails
        """
        errors: List[str] = []

        valid_log_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if str(self.log_level).upper() not in valid_log_levels:
            errors.append(f"log_level must be one of {valid_log_levels}, got '{self.log_level}'")

        for name in ("search_depth", "verify_depth", "conjecture_depth", "invariants_depth"):
            value = getattr(self, name)
            if not 2 <= value <= MAX_DEPTH:
                errors.append(f"{name} must be in [2, {MAX_DEPTH}], got {value}")

        if self.search_depth > 10:
            logger.warning(f"search_depth is very high ({self.search_depth}), developments grow exponentially")

        if self.eps <= 0:
            errors.append(f"eps must be positive, got {self.eps}")
        if self.angle_eps <= 0:
            errors.append(f"angle_eps must be positive, got {self.angle_eps}")
        elif self.angle_eps < self.eps:
            errors.append(f"angle_eps ({self.angle_eps}) must not be smaller than eps ({self.eps})")

        if self.cmax < 2:
            errors.append(f"cmax must be at least 2, got {self.cmax}")
        if self.tile_cap <= 0:
            errors.append(f"tile_cap must be positive, got {self.tile_cap}")
        if self.threads < 0:
            errors.append(f"threads cannot be negative, got {self.threads}")
        if self.realization_max_entry < 2:
            errors.append(f"realization_max_entry must be at least 2, got {self.realization_max_entry}")

        if not self.output_directory:
            errors.append("output_directory cannot be empty")

        # Raise all errors at once
        if errors:
            raise ConfigValidationError(
                f"Configuration validation failed:\n" + "\n".join(f"  - {error}" for error in errors)
            )

    @classmethod
    def from_dict(cls, config: Dict[str, Any]) -> 'Settings':
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(config) - known)
        if unknown:
            logger.warning(f"Ignoring unknown configuration keys: {unknown}")
        return cls(**{key: value for key, value in config.items() if key in known})

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def search_config(self, depth: Optional[int] = None):
        from ..turnover.search import SearchConfig

        return SearchConfig(
            depth=depth if depth is not None else self.search_depth,
            eps=self.eps,
            cmax=self.cmax,
            tile_cap=self.tile_cap,
            angle_eps=self.angle_eps,
            threads=self.threads,
        )


_ENV_OVERRIDES = {
    'TURNOVER_THREADS': ('threads', int),
    'TURNOVER_DEPTH': ('search_depth', int),
    'TURNOVER_LOG_LEVEL': ('log_level', str),
}


def load_config(config_path: Optional[str] = None) -> Settings:
    # Load .env file to make environment variables available
    load_dotenv()

    if config_path is None:
        config_path = os.getenv('TURNOVER_CONFIG_PATH', 'config.yaml')

    config_file = Path(config_path)

    config_data: Dict[str, Any] = {}
    if config_file.exists():
        with open(config_file, 'r') as f:
            if config_file.suffix in ['.yaml', '.yml']:
                config_data = yaml.safe_load(f) or {}
            elif config_file.suffix == '.json':
                config_data = json.load(f)
            else:
                raise ValueError(f"Unsupported config file format: {config_file.suffix}")

    for variable, (key, convert) in _ENV_OVERRIDES.items():
        value = os.getenv(variable)
        if value:
            try:
                config_data[key] = convert(value)
            except ValueError as e:
                raise ConfigValidationError(f"Configuration validation failed:\n  - {variable}={value!r}: {e}") from e

    return Settings.from_dict(config_data)


def save_config(settings: Settings, config_path: str = 'config.yaml') -> None:
    config_file = Path(config_path)

    with open(config_file, 'w') as f:
        if config_file.suffix in ['.yaml', '.yml']:
            yaml.dump(settings.to_dict(), f, default_flow_style=False)
        elif config_file.suffix == '.json':
            json.dump(settings.to_dict(), f, indent=2)
        else:
            raise ValueError(f"Unsupported config file format: {config_file.suffix}")
