"""Exception types shared across the toolkit."""

from __future__ import annotations


class DiscourseKitError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(DiscourseKitError):
    """Invalid or incomplete configuration (bad keys, missing entries)."""


class TransportError(DiscourseKitError):
    """Network-level failure talking to a remote endpoint; retriable."""


class NotFoundError(DiscourseKitError):
    """A remote or local resource does not exist."""


class PreconditionError(DiscourseKitError):
    """An operation was called with arguments violating its contract."""


class StoreError(DiscourseKitError):
    """A corpus store file is missing or unreadable."""

    def __init__(self, key: str, message: str) -> None:
        super().__init__(f"{key}: {message}")
        self.key = key


class NumericDomainError(DiscourseKitError):
    """A statistic hit an invalid numeric domain (e.g. log of non-positive)."""


class TrainingDivergedError(DiscourseKitError):
    """Embedding training produced NaN/Inf vectors."""

    def __init__(self, epoch: int, lr: float) -> None:
        super().__init__(f"training diverged at epoch {epoch} (lr={lr:.6g})")
        self.epoch = epoch
        self.lr = lr


class DependencyError(DiscourseKitError):
    """A pipeline stage was requested before its producer stage ran."""

    def __init__(self, stage: str, producer: str, what: str) -> None:
        super().__init__(
            f"stage '{stage}' is missing {what}; run stage '{producer}' first"
        )
        self.stage = stage
        self.producer = producer


class StageError(DiscourseKitError):
    """A pipeline stage failed; caches of completed stages are preserved."""

    def __init__(self, stage: str, cause: Exception) -> None:
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
