"""Effective certification of constant maximizers for the weighted adjoint
Fourier restriction inequality on S^{d-1}, d = 3..7."""

from .closedforms import SUPPORTED_DIMENSIONS, Dimension
from .config import ConfigError, JobConfig, load_config, parse_config
from .pipeline import run_certify
from .profiles import RadialProfile
from .report import CertificateReport
from .selftest import run_selftest
from .tables import emit_tables

__version__ = "0.1.0"

__all__ = ["SUPPORTED_DIMENSIONS", "Dimension", "RadialProfile", "JobConfig", "ConfigError",
           "load_config", "parse_config", "run_certify", "CertificateReport", "emit_tables",
           "run_selftest", "__version__"]
