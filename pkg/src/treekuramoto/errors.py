"""Shared exception hierarchy.

Exit-code categories used by the CLI hang off these bases: configuration
problems (bad input data) versus numeric failures (a computation that
cannot proceed or did not converge).
"""


class TreeKuramotoError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(TreeKuramotoError):
    """Invalid user-supplied configuration or input data."""


class NumericError(TreeKuramotoError):
    """A numeric computation failed or its hypotheses do not hold."""
