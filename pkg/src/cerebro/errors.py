"""Exception types shared across the pipeline.

Every failure mode surfaces as a subclass of :class:`CerebroError` carrying
structured fields, so callers (in particular the CLI and batch validator)
can map errors to diagnostics and exit codes without string matching.
"""

from __future__ import annotations


class CerebroError(Exception):
    """Base class for all structured errors raised by this package."""


# --- SWC parsing / forest validation -----------------------------------------


class SwcError(CerebroError):
    """Base class for SWC parse and validation failures."""


class MalformedLine(SwcError):
    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


def _at_line(line_no: int | None) -> str:
    return f" (line {line_no})" if line_no is not None else ""


class DuplicateId(SwcError):
    def __init__(self, record_id: int, line_no: int | None = None):
        self.record_id = record_id
        self.line_no = line_no
        super().__init__(f"duplicate record id {record_id}{_at_line(line_no)}")


class DanglingParent(SwcError):
    def __init__(self, record_id: int, parent_id: int, line_no: int | None = None):
        self.record_id = record_id
        self.parent_id = parent_id
        self.line_no = line_no
        super().__init__(
            f"record {record_id} references missing parent {parent_id}{_at_line(line_no)}"
        )


class MultipleRoots(SwcError):
    def __init__(self, root_ids: list[int]):
        self.root_ids = list(root_ids)
        super().__init__(f"multiple roots: {self.root_ids}")


class NoRoot(SwcError):
    def __init__(self):
        super().__init__("no record with parent -1")


class CycleDetected(SwcError):
    def __init__(self, record_id: int, line_no: int | None = None):
        self.record_id = record_id
        self.line_no = line_no
        super().__init__(
            f"parent chain of record {record_id} never reaches a root{_at_line(line_no)}"
        )


class NonPositiveRadius(SwcError):
    def __init__(self, record_id: int, line_no: int | None = None):
        self.record_id = record_id
        self.line_no = line_no
        super().__init__(f"record {record_id} has non-positive radius{_at_line(line_no)}")


# --- vessel graph / classification --------------------------------------------


class DegenerateChain(CerebroError):
    def __init__(self, edge_id: int):
        self.edge_id = edge_id
        super().__init__(f"edge {edge_id} has fewer than 2 distinct positions")


class ClassificationFailed(CerebroError):
    """A required anatomical bifurcation was absent at some stage."""

    def __init__(self, stage: int, node_id: int, detail: str = ""):
        self.stage = stage
        self.node_id = node_id
        self.detail = detail
        msg = f"classification stage {stage} failed at node {node_id}"
        super().__init__(msg + (f": {detail}" if detail else ""))


class UnknownEdge(CerebroError):
    def __init__(self, edge_id):
        self.edge_id = edge_id
        super().__init__(f"unknown edge {edge_id!r}")


class UnknownLabel(CerebroError):
    def __init__(self, label: str):
        self.label = label
        super().__init__(f"unknown artery label {label!r}")


class InvariantViolation(CerebroError):
    def __init__(self, description: str):
        self.description = description
        super().__init__(description)


class CannotClose(CerebroError):
    """The Circle of Willis ring cannot be closed even with dashed insertions."""

    def __init__(self, missing_labels: list[str]):
        self.missing_labels = list(missing_labels)
        super().__init__(f"cannot close ring, missing {self.missing_labels}")


class SeverityOutOfRange(CerebroError):
    def __init__(self, severity: float):
        self.severity = severity
        super().__init__(f"severity must be in (0, 1), got {severity}")


class SchemaMismatch(CerebroError):
    def __init__(self, found, expected):
        self.found = found
        self.expected = expected
        super().__init__(f"scene schema version {found!r}, expected {expected!r}")


class MalformedScene(CerebroError):
    def __init__(self, reason: str):
        super().__init__(f"not a scene document: {reason}")


class ConfigError(CerebroError):
    def __init__(self, message: str):
        super().__init__(message)
