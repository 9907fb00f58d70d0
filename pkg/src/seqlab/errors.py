class SeqlabError(Exception):
    """Base class for every error raised by seqlab."""


class InvalidModulusError(SeqlabError, ValueError):
    pass


class UnsupportedModulusError(SeqlabError, ValueError):
    """The modulus is valid but outside what an operation can handle."""


class CapacityError(SeqlabError, MemoryError):
    """A table would exceed the configured memory budget or hard cap."""


class BudgetExceededError(SeqlabError):
    """A search ran out of wall-clock or tuple budget.

    ``partial`` holds the non-certified result gathered so far.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ChecksumError(SeqlabError, ValueError):
    pass
