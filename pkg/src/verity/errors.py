"""Exception hierarchy shared across the toolkit.

Argument/contract violations raise plain ``ValueError``; the classes here
cover failures tied to external inputs (files, tables, manifests) and
degenerate data, which the CLI maps onto distinct exit codes.
"""


class VerityError(Exception):
    """Base class for toolkit-specific failures."""


class DecodeError(VerityError):
    """An image file could not be decoded (unreadable, truncated, or an
    unsupported format/bit depth)."""


class IngestionError(VerityError):
    """A feature, probability, manifest, or report file is malformed."""


class ConfigError(VerityError):
    """A configuration input (run config, IBS table file) is invalid."""


class DegenerateInputError(VerityError):
    """Numerically degenerate input: constant histogram, zero vector, or a
    zero human score feeding a relative error."""


class PairResolutionError(VerityError):
    """One or more (model, metric) pairs could not be resolved against the
    available bin tables or MOS records."""

    def __init__(self, missing):
        self.missing = list(missing)
        items = "; ".join(str(m) for m in self.missing)
        super().__init__(f"unresolved pairs: {items}")
