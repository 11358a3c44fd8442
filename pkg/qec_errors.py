"""Exception hierarchy shared by every workbench module.

Library code raises these; the command-line router in ``main.py`` catches
``QecError`` and maps it onto an exit status.
"""


class QecError(Exception):
    """Base class for all workbench errors."""

    exit_code = 1


class PauliParseError(QecError):
    """A Pauli label could not be parsed."""

    def __init__(self, label, position, reason):
        self.label = label
        self.position = position
        self.reason = reason
        super().__init__(f"cannot parse Pauli label {label!r} at position {position}: {reason}")


class DimensionError(QecError):
    """Operands act on different numbers of qubits, or a size limit was hit."""


class CodeDefinitionError(QecError):
    """A stabilizer code (or a CSS construction input) is malformed."""


class ChannelError(QecError):
    """A noise channel was built with invalid parameters or used for an unsupported operation."""


class DensityMatrixError(QecError):
    """Input is not a valid density matrix within tolerance."""


class OracleError(QecError):
    """Preconditions of a dense-oracle computation are violated."""


class GadgetError(QecError):
    """A syndrome gadget cannot be built or a fault location is invalid."""


class EnumerationLimitError(QecError):
    """An exhaustive enumeration would exceed its configured ceiling."""


class ConfigError(QecError):
    """Experiment configuration is missing a key or holds an invalid value."""

    exit_code = 2


class ThresholdError(QecError):
    """A level map has no sign change of f(p) - p on the scan grid."""
