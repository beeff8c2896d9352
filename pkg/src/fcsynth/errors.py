# SPDX-License-Identifier: MIT


class FcsynthError(Exception):
    """Base class for every error raised by fcsynth."""

    pass


class InputValidationError(FcsynthError):
    """Raised when an input file, record or configuration is invalid."""

    pass


class BackendError(FcsynthError):
    """Raised when a chat backend or executor cannot produce a usable answer."""

    pass
