"""
Error hierarchy shared by the simulator, perception stack, reasoners and harness.
"""


class GarmentPipelineError(Exception):
    """Base class for every error raised by this package."""


class DomainError(GarmentPipelineError, ValueError):
    """An operation was called outside its declared preconditions."""


class SceneGenerationError(GarmentPipelineError):
    """Scene parameters cannot produce a valid pile."""


class NoGarmentError(DomainError):
    """A prompt or pinch landed on a cell no garment covers."""


class ConfigError(GarmentPipelineError):
    """Invalid or incomplete run configuration (CLI exit code 2)."""


class ReasonerError(GarmentPipelineError):
    """A reasoner could not produce a decision."""


class ReasonerProtocolError(ReasonerError):
    """The remote decision service answered with a malformed or invalid body (CLI exit code 3)."""


class ReasonerUnavailableError(ReasonerError):
    """The remote decision service could not be reached after all retries."""
