"""Exception hierarchy.

Everything raised on purpose derives from :class:`QxentError`; most classes
also subclass the matching builtin so callers catching ``ValueError`` keep
working.
"""

import numpy as np


class QxentError(Exception):
    """Base class for errors raised by qxent."""


class NotHermitian(QxentError, ValueError):
    pass


class NotPsd(QxentError, ValueError):
    pass


class NoConvergence(QxentError, np.linalg.LinAlgError):
    pass


class ZeroMatrix(QxentError, ValueError):
    pass


class Singular(QxentError, np.linalg.LinAlgError):
    pass


class DimensionMismatch(QxentError, ValueError):
    pass


class InvalidDensity(QxentError, ValueError):
    """Matrix failed density-matrix validation; ``reason`` says which check."""

    def __init__(self, reason):
        super().__init__(f"invalid density matrix: {reason}")
        self.reason = reason


class InvalidMeasurement(QxentError, ValueError):
    pass


class LabelMismatch(QxentError, ValueError):
    pass


class ZeroProbability(QxentError, ValueError):
    pass


class ZeroProbabilityRecord(ZeroProbability):
    """A dataset record has (numerically) zero probability under the model."""

    def __init__(self, index):
        super().__init__(f"record {index} has zero probability under the model")
        self.index = index


class IncompleteSet(QxentError, ValueError):
    pass


class ModelMismatch(QxentError, ValueError):
    """A state-perspective empirical matrix was paired with a different model."""


class ConfigError(QxentError, ValueError):
    pass
