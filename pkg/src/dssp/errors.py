"""Exception hierarchy shared by every module."""

from __future__ import annotations


class DsspError(Exception):
    pass


class LevelOutOfRangeError(DsspError, ValueError):
    pass


class UnknownStateError(DsspError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class StructuralError(DsspError):
    """An automaton, supervisor or policy does not belong to the object it is used with."""


class DomainError(DsspError, ValueError):
    pass


class GenerationError(DsspError):
    pass


class DiagnosticError(DsspError):
    """Carries a list of diagnostics (violations or syntax problems)."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class ModelSyntaxError(DiagnosticError):
    pass


class ValidationError(DiagnosticError):
    pass
