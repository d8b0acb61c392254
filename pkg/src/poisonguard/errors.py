"""Exception types raised across the package."""


class PoisonguardError(Exception):
    """Base class for all package errors."""


class MalformedHex(PoisonguardError, ValueError):
    pass


class BadChecksum(PoisonguardError, ValueError):
    pass


class LengthOverflow(PoisonguardError, ValueError):
    pass


class MalformedNumber(PoisonguardError, ValueError):
    pass


class PrecisionLoss(PoisonguardError, ValueError):
    pass


class SchemaError(PoisonguardError, ValueError):
    """Input document does not match its schema.

    ``pointer`` is a JSON-pointer-style location such as ``/transfers/3/from``.
    """

    def __init__(self, message: str, pointer: str = ""):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {message}")


class DuplicateRecord(PoisonguardError, ValueError):
    pass


class NotTransferEvent(PoisonguardError, ValueError):
    pass


class MalformedLog(PoisonguardError, ValueError):
    pass


class InvalidEndpoint(PoisonguardError, ValueError):
    pass


class MismatchedVerdicts(PoisonguardError, ValueError):
    pass


class NotLookalike(PoisonguardError, ValueError):
    pass


class SearchExhausted(PoisonguardError):
    pass
