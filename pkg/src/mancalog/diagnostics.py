from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence


@dataclass(frozen=True)
class SourceSpan:
    file: Optional[str]
    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return f"{self.file or '<input>'}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    """One problem found in an input, with an optional source location.

    ``code`` is a short machine-readable tag (``syntax``, ``duplicate-nonfluent-fact``...).
    ``path`` locates JSON problems (``$.edges[3]``) when there is no span.
    """

    code: str
    message: str
    span: Optional[SourceSpan] = None
    path: Optional[str] = None

    def __str__(self) -> str:
        where = str(self.span) if self.span else (self.path or "<input>")
        return f"{where}: {self.code}: {self.message}"


class DiagnosticError(Exception):
    """Raised when an input cannot be turned into a valid object."""

    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))
