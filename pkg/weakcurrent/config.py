# weakcurrent/config.py

import os
from pathlib import Path
from typing import Dict, Optional, Union

from dotenv import load_dotenv
from dotenv.parser import parse_stream

from weakcurrent.errors import ConfigError

# Load environment variables from .env file
load_dotenv()

# Logging configuration
LOG_LEVEL = os.getenv("WEAKCURRENT_LOG_LEVEL", "INFO")
LOG_FILE = os.getenv("WEAKCURRENT_LOG_FILE", "")

# Unit preset used when neither the config file nor the CLI picks one
DEFAULT_UNITS = os.getenv("WEAKCURRENT_UNITS", "natural")

# Quadrature configuration
DEFAULT_REL_TOL = float(os.getenv("WEAKCURRENT_REL_TOL", "1e-9"))
DEFAULT_MAX_EVALS = int(os.getenv("WEAKCURRENT_MAX_EVALS", "200000"))
QUAD_RETRY_ATTEMPTS = int(os.getenv("WEAKCURRENT_QUAD_RETRIES", "3"))

# Monte Carlo configuration
DEFAULT_MC_SAMPLES = int(os.getenv("WEAKCURRENT_MC_SAMPLES", "1000000"))
DEFAULT_SEED = int(os.getenv("WEAKCURRENT_SEED", "20140901"))
# Fixed chunk size keeps Monte Carlo estimates independent of the worker count
MC_CHUNK_SIZE = int(os.getenv("WEAKCURRENT_MC_CHUNK", "65536"))

# Parallelism for sweeps and Monte Carlo chunks
DEFAULT_WORKERS = int(os.getenv("WEAKCURRENT_WORKERS", "1"))

# Conventional graphene Fermi velocity in m/s (not a CODATA value)
SI_FERMI_VELOCITY = float(os.getenv("WEAKCURRENT_FERMI_VELOCITY", "1.0e6"))

# Keys accepted in a run configuration file
CONSTANT_KEYS = ("hbar", "e_charge", "v_f")
RUN_CONFIG_KEYS = (
    "units",
    "format",
    "out",
    "quad",
    "rel_tol",
    "max_evals",
    "mc_samples",
    "seed",
    "workers",
    "degeneracy",
) + CONSTANT_KEYS


def _binding_line(binding) -> int:
    """Line of the key itself; the parser's mark also covers blank lines before it."""
    string = binding.original.string
    leading = string[: len(string) - len(string.lstrip())]
    return binding.original.line + leading.count("\n")


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Parse a flat key=value run configuration file.

    Returns the raw string values keyed by name. Lines that do not parse and
    keys outside RUN_CONFIG_KEYS raise ConfigError carrying the line number.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")

    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as stream:
        for binding in parse_stream(stream):
            line = _binding_line(binding)
            if binding.error:
                raise ConfigError(
                    f"cannot parse {binding.original.string.strip()!r}", line=line
                )
            if binding.key is None:
                # blank line or comment
                continue
            if binding.key not in RUN_CONFIG_KEYS:
                raise ConfigError(f"unknown key {binding.key!r}", line=line)
            if binding.value is None or binding.value == "":
                raise ConfigError(f"missing value for {binding.key!r}", line=line)
            values[binding.key] = binding.value
    return values


def environment_defaults() -> Dict[str, Optional[str]]:
    """Run-level defaults resolved from the environment."""
    return {
        "units": DEFAULT_UNITS,
        "format": os.getenv("WEAKCURRENT_FORMAT") or None,
        "out": None,
        "quad": "adaptive",
        "rel_tol": str(DEFAULT_REL_TOL),
        "max_evals": str(DEFAULT_MAX_EVALS),
        "mc_samples": str(DEFAULT_MC_SAMPLES),
        "seed": str(DEFAULT_SEED),
        "workers": str(DEFAULT_WORKERS),
        "degeneracy": "1",
    }
