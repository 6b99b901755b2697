"""Exception hierarchy shared across the toolkit."""


class ModtestError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(ModtestError):
    """Input file violates the declared schema (bad mapping, duplicate ids)."""


class MissingBaselineError(ModtestError):
    """A seed has no baseline verdict."""


class InvalidTextError(ModtestError):
    """Text input is empty or otherwise unusable."""


class GlyphCoverageError(ModtestError):
    """A codepoint is not covered by the active font."""

    def __init__(self, codepoint: int):
        self.codepoint = codepoint
        super().__init__(f"font does not cover U+{codepoint:04X} ({chr(codepoint)!r})")


class ParamError(ModtestError):
    """A parameter is outside its documented range."""


class CloudInfeasibleError(ModtestError):
    """Word-cloud mask too thin to fit any benign word."""


class CompositionError(ModtestError):
    """Perturbation chain violates the ordering rule."""


class ConfigError(ModtestError):
    """Invalid harness or CLI configuration."""


class TransportError(ModtestError):
    """Moderation target unreachable or returned a transport-level failure."""

    def __init__(self, message: str, retryable: bool = False, status: int | None = None):
        self.retryable = retryable
        self.status = status
        super().__init__(message)


class CaseTransportError(TransportError):
    """Transport failure recorded for one test case after retries were exhausted."""


class AuthError(ModtestError):
    """Target rejected our credentials; not retryable."""


class ProtocolError(ModtestError):
    """Target response did not match the configured mapping."""


class DecodeError(ModtestError):
    """Artifact bytes could not be decoded as an image."""


class BindError(ModtestError):
    """Mock service could not bind its port."""
