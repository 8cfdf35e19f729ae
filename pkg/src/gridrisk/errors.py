"""Exception hierarchy shared by all gridrisk modules."""

from __future__ import annotations

from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:
    from gridrisk.catalog import Finding


class GridRiskError(Exception):
    """Base class for every error raised by this package."""


class ParseError(GridRiskError):
    """The catalog document is not well-formed (bad encoding or JSON)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class ValidationError(GridRiskError):
    """The document parsed but violates a catalog invariant.

    ``findings`` holds every error-severity finding; each names the
    offending entity id.
    """

    def __init__(self, findings: Sequence[Finding]):
        self.findings = tuple(findings)
        lines = "; ".join(f"{f.entity}: {f.message}" for f in self.findings)
        super().__init__(lines or "invalid catalog")


class RangeError(GridRiskError, ValueError):
    """A score or triple component lies outside the 0-10 scale."""


class GraphError(GridRiskError):
    """A dependency graph violates one of its structural invariants."""


class CycleError(GraphError):
    """The dependency graph contains a directed cycle."""


class UnknownNode(GraphError, KeyError):
    """A node id was referenced that the graph does not declare."""

    def __str__(self) -> str:
        return Exception.__str__(self)


class UnknownMitigation(GridRiskError, KeyError):
    """A plan references a mitigation id absent from the catalog."""

    def __str__(self) -> str:
        return Exception.__str__(self)
