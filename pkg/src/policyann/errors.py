"""Exception types shared across the toolkit."""


class PolicyAnnError(Exception):
    """Base class for all toolkit errors."""


class SpanNotFound(PolicyAnnError):
    """An annotation segment does not occur in the passage text."""


class SchemaViolation(PolicyAnnError):
    """A document does not conform to the passage-list JSON schema."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class InvalidDocument(PolicyAnnError):
    """No usable main content could be located in an HTML document."""


class Unparseable(PolicyAnnError):
    """A model reply contained no JSON array."""


class ProviderUnavailable(PolicyAnnError):
    """A chat or embedding backend could not be reached."""


class ResponseTooLong(PolicyAnnError):
    """The backend truncated its reply."""


class DegenerateInput(PolicyAnnError):
    """Fewer distinct points than requested clusters."""


class InsufficientMembers(PolicyAnnError):
    """A cluster is smaller than its requested sample allocation."""


class InvalidAnnotation(PolicyAnnError):
    """An annotation failed validation against its passage."""


class AlreadyReviewed(PolicyAnnError):
    """The reviewer already submitted a review for this task."""


class TaskFinalized(PolicyAnnError):
    """The task is finalized and immutable."""


class NotDisputed(PolicyAnnError):
    """Dispute resolution was requested for a task that is not disputed."""


class IncompleteReview(PolicyAnnError):
    """Ground-truth export requested while passages are still unreviewed."""

    def __init__(self, policy_id: str, pending_ids: list):
        self.policy_id = policy_id
        self.pending_ids = list(pending_ids)
        super().__init__(
            f"policy {policy_id!r} has unfinalized passages: {', '.join(self.pending_ids)}"
        )


class ConfigError(PolicyAnnError):
    """A configuration file is invalid."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
