"""
Configuration loading for truncation and oracle policies.

A configuration file is YAML or JSON, chosen by extension, with two optional
sections:

    sum_control:
      rel_tol: 1.0e-12
      max_terms: 200000
      mode: accelerated
    oracle_control:
      m_max: 1001
      j_max: 1000
      delta: 0.04
      rel_tol: 1.0e-12
"""

import json
import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import yaml

from .exceptions import CasimirError, ConfigError
from .lattice import SumControl, SumMode
from .oracle import OracleControl

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = "TISCASIMIR_CONFIG"

_SECTIONS = {"sum_control": SumControl, "oracle_control": OracleControl}


@dataclass(frozen=True)
class EngineConfig:
    """Sum and oracle policies together with the file they came from."""

    sum_control: SumControl = field(default_factory=SumControl)
    oracle_control: OracleControl = field(default_factory=OracleControl)
    source: Optional[str] = None

    def with_overrides(
        self,
        rel_tol: Optional[float] = None,
        max_terms: Optional[int] = None,
        mode: Optional[Union[str, SumMode]] = None,
    ) -> "EngineConfig":
        """Return a copy with explicit command-line values taking precedence."""
        changes: Dict[str, Any] = {}
        if rel_tol is not None:
            changes["rel_tol"] = rel_tol
        if max_terms is not None:
            changes["max_terms"] = max_terms
        if mode is not None:
            changes["mode"] = mode
        if not changes:
            return self
        return replace(self, sum_control=replace(self.sum_control, **changes))


class ConfigLoader:
    """Finds, parses and validates configuration files."""

    @staticmethod
    def discover(explicit: Optional[Union[str, Path]] = None) -> Optional[Path]:
        """
        Locate the configuration file to use.

        Args:
            explicit: Path given on the command line, if any

        Returns:
            The explicit path, else the path named by TISCASIMIR_CONFIG, else None
        """
        if explicit:
            return Path(explicit)
        env_path = os.environ.get(CONFIG_ENV_VAR)
        if env_path:
            logger.debug("Using configuration from %s=%s", CONFIG_ENV_VAR, env_path)
            return Path(env_path)
        return None

    def load(self, path: Optional[Union[str, Path]] = None) -> EngineConfig:
        """
        Load a configuration, falling back to the defaults when no file is found.

        Raises:
            ConfigError: If the file is missing, malformed or has invalid values
        """
        resolved = self.discover(path)
        if resolved is None:
            return EngineConfig()
        if not resolved.is_file():
            raise ConfigError(str(resolved), f"Configuration file not found: {resolved}")
        content = resolved.read_text(encoding="utf-8")
        data = self._parse_content(content, resolved.suffix.lower(), str(resolved))
        return self.from_mapping(data, source=str(resolved))

    @staticmethod
    def _parse_content(content: str, file_ext: str, source: str) -> Dict[str, Any]:
        """Parse file content based on extension."""
        try:
            if file_ext == ".json":
                data = json.loads(content)
            elif file_ext in (".yaml", ".yml"):
                data = yaml.safe_load(content)
            else:
                raise ConfigError(
                    source, f"{source}: unsupported configuration format {file_ext!r}"
                )
        except json.JSONDecodeError as e:
            raise ConfigError(source, f"{source}: invalid JSON: {e}")
        except yaml.YAMLError as e:
            raise ConfigError(source, f"{source}: invalid YAML: {e}")
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ConfigError(source, f"{source}: configuration root must be a mapping")
        return data

    @staticmethod
    def from_mapping(data: Mapping[str, Any], source: Optional[str] = None) -> EngineConfig:
        """Build an EngineConfig from parsed data, rejecting unknown keys."""
        label = source or "<mapping>"
        unknown = set(data) - set(_SECTIONS)
        if unknown:
            raise ConfigError(label, f"{label}: unknown configuration sections {sorted(unknown)}")
        built: Dict[str, Any] = {}
        for section, cls in _SECTIONS.items():
            values = data.get(section) or {}
            if not isinstance(values, dict):
                raise ConfigError(label, f"{label}: section '{section}' must be a mapping")
            allowed = {f.name for f in fields(cls)}
            extra = set(values) - allowed
            if extra:
                raise ConfigError(label, f"{label}: unknown keys in '{section}': {sorted(extra)}")
            try:
                built[section] = cls(**values)
            except (CasimirError, TypeError, ValueError) as e:
                raise ConfigError(label, f"{label}: invalid '{section}': {e}")
        return EngineConfig(source=source, **built)
