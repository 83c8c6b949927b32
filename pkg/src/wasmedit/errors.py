"""Exception hierarchy for the toolkit.

Everything raised on purpose derives from WasmEditError, so callers can
catch one type at the CLI boundary.  Plain ValueError/IndexError/
OverflowError are still used where Python convention expects them
(bad constructor arguments, out-of-range index spaces, varint width).
"""


class WasmEditError(Exception):
    """Base class for all toolkit errors."""


class FormatError(WasmEditError):
    """The input bytes violate the binary format."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class TruncatedError(FormatError):
    """The input ended before a complete construct was read."""


class EncodeError(WasmEditError):
    """The object model cannot be serialized (e.g. unknown mnemonic)."""


class TypeMismatchError(WasmEditError):
    """A signature does not match where an identical one is required."""


class StaleSelectionError(WasmEditError):
    """A selection was used after the module changed underneath it."""


class FieldError(WasmEditError, AttributeError):
    """An unknown field name was used on a selection."""


class ImmutableFieldError(WasmEditError):
    """An idx field was passed to update(); indices belong to the fixer."""


class BrokenReferenceError(WasmEditError):
    """An edit would leave (or found) a dangling cross-section reference."""


class DuplicateExportError(WasmEditError):
    """An export with the same name already exists."""


class LimitError(WasmEditError):
    """A limits field (memory/table min/max) would become invalid."""


class UnresolvableOffsetError(WasmEditError):
    """A data segment with a non-literal offset blocks a memory patch."""


class StructureError(WasmEditError):
    """The object model is structurally unusable for the requested edit."""


class PreconditionError(WasmEditError):
    """A recipe's documented precondition does not hold for this module."""
