#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Exceptions raised by CARMApytools. Argument errors are plain ``ValueError``.
The command line maps the families below to exit codes: data errors to 3,
numerical errors to 4, everything else derived from ``ValueError`` to 2.
"""


class SpecificationError(ValueError):
    """
    Inconsistent CARMA specification (orders, normalization or a common
    factor between the autoregressive and moving-average polynomials).
    """


class InvalidParameterError(ValueError):
    """
    A model parameter violates its constraints.
    """


class NonInvertibleError(InvalidParameterError):
    """
    The credit triangle cannot be inverted for the given recovery parameters.
    """


class UnsupportedDriverError(TypeError):
    """
    Operation is not defined for this kind of Levy driver.
    """


class UnsupportedConfigurationError(NotImplementedError):
    """
    The requested combination of model and operation is not supported.
    """


class UnsupportedModeError(ValueError):
    """
    The recovery mode of the input does not match the requested operation.
    """


class UsageError(ValueError):
    """
    Invalid command-line or configuration input.
    """


class NumericalError(ArithmeticError):
    """
    Base class of numerical failures.
    """


class StationarityError(NumericalError):
    """
    The companion matrix has an eigenvalue with non-negative real part.
    """


class DegeneracyError(NumericalError):
    """
    Repeated eigenvalues. Use the matrix-exponential path instead.
    """


class SingularityError(NumericalError):
    """
    The companion matrix is singular.
    """


class ConditioningError(NumericalError):
    """
    The Kalman filter lost positive definiteness.

    Args:
        message (str)
        index (int): Observation index where it happened.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class OptimizationError(NumericalError):
    """
    No optimizer start converged.

    Args:
        message (str)
        best (dict | None): Best parameters found so far, with their
            log-likelihood under ``'loglik'``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DataQualityError(ValueError):
    """
    Input series cannot be used as it is.
    """


class DuplicateDateError(DataQualityError):
    """
    The same date appears more than once.
    """


class MalformedRowError(DataQualityError):
    """
    Rows that cannot be parsed.

    Args:
        message (str)
        lines (list[int]): 1-based line numbers of the offending rows.
    """

    def __init__(self, message, lines=()):
        super().__init__(message)
        self.lines = list(lines)
