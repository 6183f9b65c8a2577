"""Exception types raised by ncnat."""


class NcnatError(Exception):
    """Base class for all library errors."""


class ParseError(NcnatError, ValueError):
    """Malformed term, polynomial, or chain text.

    ``offset`` is the byte offset into the input where parsing failed.
    """

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class StratumBudgetError(NcnatError):
    """A magnitude exceeds the configured ``n_max``."""

    def __init__(self, n: int, limit: int):
        self.n = n
        self.limit = limit
        super().__init__(
            f"magnitude {n} exceeds the stratum budget n_max={limit} "
            f"(raise it with --n-max or NCNAT_N_MAX)"
        )


class SiteError(NcnatError, ValueError):
    """A rewrite site does not address a subtree of shape ((w x) (y z))."""
