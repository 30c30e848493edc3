import logging
from contextlib import contextmanager
from typing import Optional

LOGGER = logging.getLogger(__name__)


class StreamRecError(Exception):
    """Root of every error raised by streamrec."""


class ConfigurationError(StreamRecError):
    pass


class ValidationError(StreamRecError):
    pass


class MalformedRowError(ValidationError):

    def __init__(self, source: str, line: int, reason: str):
        self.source = source
        self.line = line
        self.reason = reason
        super().__init__(f"{source}: line {line}: {reason}")


class EventOutsideSpanError(ValidationError):

    def __init__(self, event, span):
        self.event = event
        self.span = span
        super().__init__(f"event {event} lies outside the stream span {span}")


class DomainError(StreamRecError):
    pass


class PipelineError(StreamRecError):

    def __init__(self, stage: str, message: str, fold: Optional[int] = None):
        self.stage = stage
        self.fold = fold
        prefix = f"[fold {fold}] " if fold is not None else ""
        super().__init__(f"{prefix}stage '{stage}': {message}")


@contextmanager
def stage(name: str, fold: Optional[int] = None):
    """Tags any failure raised inside the block with the stage name and fold id."""
    try:
        yield
    except PipelineError:
        raise
    except Exception as e:
        LOGGER.error(f"{name} failed (fold {fold}): {e}")
        raise PipelineError(name, str(e), fold) from e
