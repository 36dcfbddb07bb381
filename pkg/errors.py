"""
Exceptions that are not plain bad input.

Bad arguments raise ValueError like everywhere else; these cover the cases
where the input is well formed but the computation cannot go ahead.
"""


class ResourceLimitError(RuntimeError):
    """A configured size cap (forest count, grid size, lift cells) would be exceeded."""


class ConvergenceError(RuntimeError):
    """Picard iteration did not settle within the window-split and iteration caps."""


class HypothesisError(ValueError):
    """An exponent condition required by the construction does not hold."""
