"""Exception types raised by the simulator."""

import numpy as np


class GeometryError(RuntimeError):
    """User dropping could not satisfy the distance constraints."""


class SingularMatrixError(np.linalg.LinAlgError):
    """A matrix that must be inverted is singular or numerically rank deficient."""


class UnboundedLimitError(ValueError):
    """The large-antenna limit has no finite value (no pilot contamination)."""


class DegenerateBoundError(ValueError):
    """The reciprocity-mismatch lower bound is vacuous (perfectly matched BS)."""


class ConfigError(ValueError):
    """Invalid experiment configuration.

    Parameters
    ----------
    message : str
        What went wrong.
    key : str, optional
        Name of the offending configuration key.
    line : int, optional
        1-based line number in the configuration text, when known.
    """

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if key is not None:
            prefix += f"'{key}': "
        super().__init__(prefix + message)


class ExperimentError(RuntimeError):
    """A numerical failure while running one sweep point."""
