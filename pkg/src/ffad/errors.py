"""Exception types shared across the ffad package.

Every failure mode raised by the library derives from FfadError so callers
(and the CLI exit-code mapping) can distinguish data problems from numeric
failures without string matching.
"""


class FfadError(Exception):
    """Base class for all ffad errors."""


class InvalidInputError(FfadError):
    """Input values are unusable (non-finite entries, inconsistent modes)."""


class ShapeError(FfadError):
    """Array dimensions do not match the operation's contract."""


class EmptyInputError(FfadError):
    """An operation received an empty dataset, batch, or corpus."""


class ComponentCountError(FfadError):
    """Requested number of frequency components is out of range for a series."""


class ParseError(FfadError):
    """A delimited input file is malformed (ragged or non-numeric rows)."""


class ClassArityError(FfadError):
    """A binary-dataset operation saw a label count other than two."""


class EmptyGroupError(FfadError):
    """A class/split partition produced an empty group."""


class BoundsError(FfadError):
    """A sample count or index exceeds what the data provides."""


class InsufficientSamplesError(FfadError):
    """Fewer samples than the minimum a statistical fit requires."""


class SerializationError(FfadError):
    """A binary model/corpus file is corrupt, truncated, or wrong version."""


class NumericError(FfadError):
    """Base class for numerical failures (divergence, indefinite matrices)."""


class DivergenceError(NumericError):
    """Training or optimization produced non-finite values."""


class NotPsdError(NumericError):
    """A matrix required to be positive semidefinite is not, beyond tolerance."""
