"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class PolydistError(Exception):
    pass


class DomainError(PolydistError, ValueError):
    """Input outside an operation's mathematical domain (CLI exit code 4)."""


class ResourceError(PolydistError):
    """A configured size cap would be exceeded (CLI exit code 3)."""


class IntractableError(ResourceError):
    """A brute-force search was asked to run outside its guarded range."""


class PartialProgressError(PolydistError):
    """Factor regularization got stuck on a combination it could not decompose."""

    def __init__(self, message, factor=None, stuck=None):
        super().__init__(message)
        self.factor = factor
        self.stuck = stuck
