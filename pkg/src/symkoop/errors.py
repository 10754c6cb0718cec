"""Exception types shared across the toolkit."""


class SymkoopError(Exception):
    """Base class for every error raised by this package."""


class InputError(SymkoopError, ValueError):
    """Malformed or dimensionally inconsistent input."""


class ConfigurationError(SymkoopError):
    """Unknown system name, unreadable file, or invalid config/JSON."""


class NumericalDivergenceError(SymkoopError):
    """Integration produced a non-finite state.

    ``step_index`` is the index of the offending step when known
    (set by ``simulate``), else None.
    """

    def __init__(self, message, step_index=None):
        super().__init__(message)
        self.step_index = step_index


class NonFiniteGroupError(SymkoopError):
    """Generator closure did not terminate within the allowed order."""


class DictionaryNotClosedError(SymkoopError):
    """The dictionary span is not invariant under the group action.

    Without an invariant span there is no finite-dimensional feature-space
    representation of the element, so conjugation transport is unavailable
    for this dictionary. ``residual`` holds the measured defect.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateDataError(SymkoopError):
    """Snapshot data carries no usable information (e.g. all-zero Yp)."""


class IsotropyRequiredError(SymkoopError):
    """Commutation check requested for an element outside the isotropy
    subgroup of the fitted set; the check is only meaningful inside it."""
