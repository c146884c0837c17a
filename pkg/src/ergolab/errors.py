"""Exception hierarchy for ergolab.

Every failure mode is a subclass of ErgolabError so CLI code can map the
whole family onto exit status 1 while argparse keeps status 2 for usage
errors.
"""


class ErgolabError(Exception):
    """Base class for all ergolab errors."""


class DomainError(ErgolabError):
    """An argument violates a documented precondition."""


class ValidationError(ErgolabError):
    """A value fails structural validation (e.g. masses not summing to 1)."""


class CapacityError(ErgolabError):
    """A construction or computation exceeds a declared resource cap.

    The message names the blocking bound; `required` carries the value the
    caller would have to raise the cap to.
    """

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class ConstructionError(ErgolabError):
    """A construction exhausted its retry budget without certifying."""


class VerificationError(ErgolabError):
    """A certificate or manifest failed exact re-verification."""
