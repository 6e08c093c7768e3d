"""Error taxonomy shared across the package.

Exit-code mapping for the CLI lives in tailchi.cli: configuration, domain and
unsupported-configuration errors exit with 2, resource and precision errors
with 3.
"""


class TailchiError(Exception):
    """Base class for all package errors."""


class ConfigurationError(TailchiError):
    """Invalid or inconsistent configuration (bad law spec, failed audit,
    nonconvergent radial CDF tabulation, unserializable objects)."""


class DomainError(TailchiError, ValueError):
    """Arguments outside the mathematical domain of an operation (unsolvable
    radius equation, nonpositive truncation eps, uncovered sup interval)."""


class UnsupportedConfigurationError(TailchiError):
    """A combination the toolkit deliberately does not support, e.g. the Cech
    rule above dimension 3 or breakpoints of a non-Rips filtration."""


class ResourceBudgetError(TailchiError):
    """Simplex enumeration exceeded the configured budget."""


class PrecisionError(TailchiError):
    """A Monte Carlo estimate failed to reach the requested accuracy within
    the sample budget."""
