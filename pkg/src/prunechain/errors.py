class PruneChainError(Exception):
    """Base class for engine errors. ``code`` is a stable machine-readable reason."""

    code = "error"

    def __init__(self, message: str = "", code: str | None = None):
        super().__init__(message or self.code)
        if code is not None:
            self.code = code


class ConfigError(PruneChainError, ValueError):
    code = "invalid-config"


class InvalidChain(PruneChainError):
    code = "invalid-chain"


class GuardViolation(PruneChainError):
    code = "guard"


class VoteRejected(PruneChainError):
    code = "vote-rejected"


class InvalidMarker(PruneChainError):
    code = "invalid-marker"


class NotEnoughSequences(PruneChainError):
    code = "not-enough-sequences"


class NotProposer(PruneChainError):
    code = "not-proposer"


class HeightMismatch(PruneChainError):
    code = "height-mismatch"


class ScriptError(PruneChainError):
    code = "script"


class SchemaViolation(PruneChainError):
    code = "schema"
