"""Exception types shared across the package."""

from __future__ import annotations


class LeakscanError(Exception):
    """Base class for all errors raised by this package."""


class IoError(LeakscanError):
    """A file or record source could not be read or written."""

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class SchemaError(LeakscanError):
    """A record is malformed: missing, empty, or mistyped field."""

    def __init__(self, line: int, field: str, reason: str = "missing or empty"):
        super().__init__(f"line {line}: field {field!r}: {reason}")
        self.line = line
        self.field = field


class DuplicateId(LeakscanError):
    def __init__(self, kind: str, value: str):
        super().__init__(f"duplicate {kind}: {value!r}")
        self.value = value


class UnknownId(LeakscanError):
    def __init__(self, task_id: str):
        super().__init__(f"prediction references unknown task_id {task_id!r}")
        self.task_id = task_id


class MissingPrediction(LeakscanError):
    def __init__(self, task_id: str):
        super().__init__(f"no prediction for task_id {task_id!r}")
        self.task_id = task_id


class VersionMismatch(LeakscanError):
    def __init__(self, found, expected):
        super().__init__(f"match database version {found!r}, expected {expected!r}")
        self.found = found
        self.expected = expected


class TaskMismatch(LeakscanError):
    """Two match sets for different problems (or capacities) cannot merge."""


class ParamMismatch(LeakscanError):
    """Fingerprint sets built with different (k, w) cannot be compared."""


class EmptySurvivorSet(LeakscanError):
    """Decontamination removed every problem; accuracy is undefined."""


class TooFewProblems(LeakscanError):
    """Decile statistics need at least ten problems."""
