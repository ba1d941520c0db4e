"""Exception types shared across the toolkit."""


class ThreadwalkError(Exception):
    """Base class for every error raised by this package."""


# --- discussion tree construction ---

class DuplicateIdError(ThreadwalkError):
    """Two records in one tree share the same id."""


class DanglingParentError(ThreadwalkError):
    """A record references a parent id that does not exist."""


class MultipleRootsError(ThreadwalkError):
    """More than one record has no parent."""


class NoRootError(ThreadwalkError):
    """No record without a parent was found."""


class CycleDetectedError(ThreadwalkError):
    """The parent relation contains a cycle (including self-reference)."""


class UnknownIdError(ThreadwalkError):
    """An id was looked up that is not part of the tree."""


class MissingPolarityLabelError(ThreadwalkError):
    """A non-root node lacks a support/attack label."""


# --- embeddings and features ---

class DimensionMismatchError(ThreadwalkError):
    """Vectors, weights or model parameters disagree on dimension."""


class NegativeWeightError(ThreadwalkError):
    """A weighted aggregation received a negative weight."""


class MissingLabelError(ThreadwalkError):
    """A node required to carry a task label is unlabeled."""


class MissingEmbeddingError(ThreadwalkError):
    """An external embedding provider has no vector for a node id."""


class MalformedFileError(ThreadwalkError):
    """An input file does not follow its documented format."""


# --- classifier ---

class SingleClassDataError(ThreadwalkError):
    """Training data contains fewer than two classes."""


class NonFiniteLossError(ThreadwalkError):
    """The training loss became NaN or infinite."""


# --- evaluation ---

class TooFewTreesError(ThreadwalkError):
    """A tree-level split needs at least two trees."""


class EmptyEvalSetError(ThreadwalkError):
    """Evaluation was requested on an empty example set."""


class NotBinaryTaskError(ThreadwalkError):
    """Error analysis is only defined for binary tasks."""


# --- synthetic corpora and configuration ---

class InvalidSpecError(ThreadwalkError):
    """A corpus specification is out of range or inconsistent."""


class ConfigError(ThreadwalkError):
    """A run configuration is invalid or incomplete."""
