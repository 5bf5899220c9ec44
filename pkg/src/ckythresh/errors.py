"""Exception types, grouped by how the command line reports them.

Format errors (bad input files) and model errors (the grammar cannot do
what was asked) get distinct exit codes so batch callers can tell them
apart.
"""


class CkyThreshError(Exception):
    """Base class for all package errors."""


class FormatError(CkyThreshError):
    """Malformed input file."""


class TreebankFormatError(FormatError):
    pass


class GrammarFormatError(FormatError):
    pass


class ModelError(CkyThreshError):
    """The model cannot handle the request (unknown terminal, no parse)."""


class UnknownTerminalError(ModelError):
    pass


class ParseFailureError(ModelError):
    """Asked for a result from a chart that has no root."""


class UnparsableSentenceError(ModelError):
    """No parse exists even with all thresholds disabled."""
