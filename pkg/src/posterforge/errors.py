"""Exception hierarchy shared across the pipeline."""

from __future__ import annotations


class PosterForgeError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(PosterForgeError):
    pass


class ContractError(PosterForgeError):
    """A caller violated an operation's precondition."""


class BackendUnavailableError(PosterForgeError):
    pass


class JSONParseError(PosterForgeError):
    def __init__(self, message: str, raw: str) -> None:
        super().__init__(message)
        self.raw = raw


class SchemaValidationError(PosterForgeError):
    """Parsed JSON did not match the named schema.

    ``fields`` lists the dotted locations that failed, ``raw`` keeps the
    model output that produced them.
    """

    def __init__(self, message: str, fields: list[str], raw: str = "") -> None:
        super().__init__(message)
        self.fields = fields
        self.raw = raw


class ConversionError(PosterForgeError):
    def __init__(self, message: str, stderr: str = "") -> None:
        super().__init__(message if not stderr else f"{message}\n{stderr}")
        self.stderr = stderr


class EmptyDocumentError(PosterForgeError):
    pass


class LayoutError(PosterForgeError):
    pass


class CompositionError(PosterForgeError):
    def __init__(self, message: str, panel_index: int | None = None) -> None:
        super().__init__(message)
        self.panel_index = panel_index


class RenderError(PosterForgeError):
    def __init__(self, message: str, panel_index: int | None = None) -> None:
        super().__init__(message)
        self.panel_index = panel_index


class MetricError(PosterForgeError):
    pass


class CapabilityError(PosterForgeError):
    pass


class QuizValidationError(PosterForgeError):
    def __init__(self, violations: list[str]) -> None:
        super().__init__("; ".join(violations))
        self.violations = violations


class QuizGenerationError(PosterForgeError):
    def __init__(self, message: str, violations: list[str], raw: str = "") -> None:
        super().__init__(f"{message}: {'; '.join(violations)}")
        self.violations = violations
        self.raw = raw


class AdministrationError(PosterForgeError):
    pass


class StageError(PosterForgeError):
    """Wraps a failure inside one pipeline stage so the CLI can map it to an exit code."""

    def __init__(self, stage: str, cause: BaseException) -> None:
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
