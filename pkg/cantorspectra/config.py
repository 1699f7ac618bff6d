"""
Configuration management for cantorspectra.
"""

import os
import json
import logging
from fractions import Fraction
from typing import Any, Dict

from .exceptions import CantorSpectraException

logger = logging.getLogger(__name__)

THREADS_ENV = "CANTOR_SPECTRA_THREADS"


class CantorSpectraConfig:
    """
    Configuration manager for cantorspectra settings.
    Handles loading and merging preferences from multiple sources.
    """
    # Default configuration
    DEFAULT_CONFIG = {
        "max_field_degree": 4,
        "check_irreducible": True,
        "telescope_bound": 10,      # consecutive levels composed to reach positivity
        "levels": 32,
        "m": 2,
        "N": 30,
        "depth": 64,
        "wbox": 2,
        "kmax": 5,
        "eps": "1/1000000",
        "enclosure_bits": 128,
        "divergence_floor": "1/64",
        "threads": 1,
        "report_digits": 30,
        "format": "json",
    }

    VALID_FORMATS = ["json", "text"]
    RUNTIME_KEYS = ("threads",)

    GLOBAL_CONFIG_NAME = "~/.cantorspectrarc.json"
    DIRECTORY_CONFIG_NAME = ".cantorspectra_config.json"

    def __init__(self, load_global=True):
        self.config = self.DEFAULT_CONFIG.copy()
        if load_global:
            self._load_global_config()
        self._load_environment()

    def _load_global_config(self):
        """Load the global configuration file if it exists"""
        global_config_path = os.path.expanduser(self.GLOBAL_CONFIG_NAME)
        self._load_config_file(global_config_path, "global")

    def load_directory_config(self, directory=None):
        """
        Load directory-specific configuration if available

        Args:
            directory (str, optional): Directory to check for config.
                If None, uses current directory.
        """
        if directory is None:
            directory = os.getcwd()

        dir_config_path = os.path.join(directory, self.DIRECTORY_CONFIG_NAME)
        self._load_config_file(dir_config_path, "directory")
        self._load_environment()

    def _load_config_file(self, config_path, config_type):
        """
        Load configuration from a file and merge with current config

        Args:
            config_path (str): Path to the configuration file
            config_type (str): Type of configuration (for warnings)
        """
        if not os.path.exists(config_path):
            return
        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                file_config = json.load(f)
        except json.JSONDecodeError:
            logger.warning(f"Invalid JSON in {config_type} configuration file: {config_path}")
            return
        except OSError as e:
            logger.warning(f"Error reading {config_type} configuration: {str(e)}")
            return

        for key, value in file_config.items():
            if key not in self.config:
                # Silently ignore unknown keys for forward compatibility
                continue
            if key == "format" and value not in self.VALID_FORMATS:
                logger.warning(f"Invalid format '{value}' in {config_type} config, using default")
                continue
            self.config[key] = value

    def _load_environment(self):
        """Apply environment overrides (thread bound)"""
        threads = os.environ.get(THREADS_ENV)
        if threads is None:
            return
        try:
            self.config["threads"] = max(1, int(threads))
        except ValueError:
            logger.warning(f"Ignoring non-integer {THREADS_ENV}={threads!r}")

    def apply_args(self, args):
        """
        Apply command-line arguments, overriding other settings

        Args:
            args (Namespace): Parsed command-line arguments
        """
        for key in self.DEFAULT_CONFIG:
            value = getattr(args, key, None)
            if value is not None:
                self.config[key] = value

    def get(self, key, default=None):
        """Get a configuration value"""
        return self.config.get(key, default)

    def set(self, key, value):
        """Set a configuration value"""
        if key in self.config:
            self.config[key] = value

    def get_fraction(self, key) -> Fraction:
        """Get a rational-valued setting (stored as "p/q" text)"""
        return Fraction(str(self.config[key]))

    def validate(self):
        """Check parameter ranges before dispatch"""
        checks = [
            ("levels", self.config["levels"] >= 2),
            ("m", self.config["m"] >= 1),
            ("N", self.config["N"] > self.config["m"]),
            ("depth", self.config["depth"] >= 1),
            ("wbox", self.config["wbox"] >= 1),
            ("kmax", self.config["kmax"] >= 1),
            ("threads", self.config["threads"] >= 1),
            ("telescope_bound", self.config["telescope_bound"] >= 1),
            ("max_field_degree", self.config["max_field_degree"] >= 1),
            ("enclosure_bits", self.config["enclosure_bits"] >= 16),
            ("format", self.config["format"] in self.VALID_FORMATS),
        ]
        for key, ok in checks:
            if not ok:
                raise CantorSpectraException(
                    f"Invalid configuration value {key}={self.config[key]!r}")
        try:
            if self.get_fraction("eps") <= 0 or self.get_fraction("divergence_floor") <= 0:
                raise CantorSpectraException("eps and divergence_floor must be positive")
        except (ValueError, ZeroDivisionError):
            raise CantorSpectraException("eps and divergence_floor must be rationals p/q")
        return self

    def as_dict(self, include_runtime: bool = False) -> Dict[str, Any]:
        """Configuration echo for reports, without runtime-only keys"""
        return {k: v for k, v in self.config.items()
                if include_runtime or k not in self.RUNTIME_KEYS}
