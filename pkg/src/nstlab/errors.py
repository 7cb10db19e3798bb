"""Exception hierarchy shared by the engine.

The CLI maps these onto its exit-code contract: input problems exit 2,
weight-file problems exit 3, usage problems exit 64.
"""


class NstError(Exception):
    """Base class for all engine errors."""


class ShapeError(NstError):
    """Operand shapes are incompatible."""


class ArgumentError(NstError):
    """An argument value violates an operation's contract."""


class DegenerateInputError(NstError):
    """Input is too small or too low-rank for the requested statistic."""


class InputError(NstError):
    """A user-supplied image or corpus is unreadable or empty."""


class WeightError(NstError):
    """Base class for weight-file problems."""


class WeightFormatError(WeightError):
    """Weight file is corrupt: bad magic, bad version, or truncated."""


class UnsupportedDtypeError(WeightError):
    """Weight file declares a dtype other than f32."""


class ManifestError(WeightError):
    """A tensor required by the network architecture is missing or misshaped."""
