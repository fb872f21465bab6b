"""Exception types shared across the package.

Three failure categories are distinguished so callers (and the CLI) can
map them to distinct exit codes:

* :class:`InvalidParameterError` -- the request itself is malformed
  (bad group order, mismatched lattice shape, out-of-range index).
* :class:`UnsupportedFeatureError` -- the request is well formed but the
  feature is outside what this package implements.
* :class:`NumericFailureError` -- the computation started but could not
  be completed reliably (non-convergence, loss of positivity).
"""

__all__ = [
    "InvalidParameterError",
    "UnsupportedFeatureError",
    "NumericFailureError",
]


class InvalidParameterError(ValueError):
    """A parameter value is malformed or inconsistent with the others."""


class UnsupportedFeatureError(NotImplementedError):
    """The requested combination is valid but not implemented here."""


class NumericFailureError(RuntimeError):
    """A numerical routine failed to converge or lost required structure."""
