"""Exception hierarchy shared across the engine."""


class CitnetError(Exception):
    """Base class for all engine errors."""


class InputFormatError(CitnetError):
    """Raised when an input file or stream cannot be parsed."""


class ContractError(CitnetError):
    """Raised when an operation is called outside its contract."""


class DuplicateIdError(ContractError):
    def __init__(self, pub_id: str):
        super().__init__(f"duplicate publication id: {pub_id!r}")
        self.pub_id = pub_id


class UnknownIdError(ContractError):
    def __init__(self, pub_id: str, context: str = ""):
        msg = f"unknown publication id: {pub_id!r}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)
        self.pub_id = pub_id


class PreconditionError(ContractError):
    """A stated operation precondition does not hold (e.g. drill with no marks)."""
