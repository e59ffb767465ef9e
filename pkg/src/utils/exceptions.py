"""
Custom exception classes for the data-word mu-calculus workbench.

This module defines application-specific exceptions so that parse errors,
fragment violations and malformed automata surface with clear messages in
the CLI, the HTTP API and the tests.
"""
from typing import Any, Iterable


class WorkbenchError(Exception):
    """Base exception for all workbench errors."""

    def __init__(self, message: str, details: str = None):
        self.message = message
        self.details = details
        super().__init__(self.message)

    def __str__(self):
        if self.details:
            return f"{self.message}: {self.details}"
        return self.message


class ValidationError(WorkbenchError):
    """Raised when input validation fails."""

    def __init__(self, field: str, value: Any, reason: str):
        message = f"Invalid {field}"
        details = f"Value '{value}' is invalid: {reason}"
        super().__init__(message, details)
        self.field = field
        self.value = value
        self.reason = reason


class FormulaSyntaxError(WorkbenchError):
    """Raised when formula text does not follow the grammar."""

    def __init__(self, text: str, position: int, reason: str):
        message = f"Syntax error at position {position}"
        super().__init__(message, reason)
        self.text = text
        self.position = position
        self.reason = reason


class UnboundVariableError(WorkbenchError):
    """Raised when evaluation meets a variable missing from the environment."""

    def __init__(self, name: str):
        super().__init__(f"Unbound variable '{name}'")
        self.name = name


class FreeVariableError(WorkbenchError):
    """Raised when an operation needs a sentence but got free variables."""

    def __init__(self, names: Iterable[str], operation: str):
        names = sorted(names)
        message = f"{operation} requires a sentence"
        super().__init__(message, f"free variables {', '.join(names)}")
        self.names = names
        self.operation = operation


class UnknownComponentError(WorkbenchError):
    """Raised when a vectorial formula has no component with the given name."""

    def __init__(self, name: str):
        super().__init__(f"Unknown component '{name}'")
        self.name = name


class FragmentError(WorkbenchError):
    """Raised when a formula lies outside the fragment an operation needs."""

    def __init__(self, fragment: str, operation: str, details: str = None):
        message = f"{operation} requires a {fragment} formula"
        super().__init__(message, details)
        self.fragment = fragment
        self.operation = operation


class AlphabetMismatchError(WorkbenchError):
    """Raised when two automata or an automaton and a word disagree on letters."""

    def __init__(self, expected: Any, found: Any):
        super().__init__("Alphabet mismatch", f"expected {expected}, found {found}")
        self.expected = expected
        self.found = found


class NonFunctionalError(WorkbenchError):
    """Raised when a transducer produces two outputs for one input."""

    def __init__(self, details: str = None):
        super().__init__("Transducer is not functional", details)


class CascadeError(WorkbenchError):
    """Raised for malformed or unsupported cascades."""

    def __init__(self, details: str = None):
        super().__init__("Malformed cascade", details)


class SerializationError(WorkbenchError):
    """Raised when JSON input cannot be turned into a workbench object."""

    def __init__(self, kind: str, details: str = None):
        super().__init__(f"Cannot load {kind}", details)
        self.kind = kind
