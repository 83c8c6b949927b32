"""Static binary rewriting toolkit for WebAssembly (core v1).

Layered like the binaries it edits: a lossless parser/encoder pair
around a typed object model, a section rewriter with four primitive
operations (select, insert, delete, update) plus an index fixer, a
semantics rewriter exposing the high-level rewriting APIs, a
structural validator with an external-tool hook, and packaged recipes
for instrumentation, hardening, and mutation.

    from wasmedit import parse_module, encode_module, semantics

    module, diagnostics = parse_module(open("a.wasm", "rb").read())
    semantics.appendGlobalVariable(module, "i64", mut=1, initValue=0)
    open("b.wasm", "wb").write(encode_module(module))
"""

from . import recipes, semantics
from .encoder import encode_module
from .errors import (
    BrokenReferenceError,
    DuplicateExportError,
    EncodeError,
    FieldError,
    FormatError,
    ImmutableFieldError,
    LimitError,
    PreconditionError,
    StaleSelectionError,
    StructureError,
    TruncatedError,
    TypeMismatchError,
    UnresolvableOffsetError,
    WasmEditError,
)
from .leb128 import (
    decode_sleb128,
    decode_uleb128,
    encode_sleb128,
    encode_uleb128,
)
from .model import (
    CodeElement,
    ConstExpr,
    CustomElement,
    DataElement,
    ElemElement,
    ExportElement,
    FunctionElement,
    GlobalElement,
    ImportElement,
    IndexSpace,
    Instruction,
    Local,
    MemoryElement,
    Module,
    NameEntry,
    NamesData,
    RewriteDelta,
    SectionKind,
    StartElement,
    TableElement,
    TypeElement,
    WILD,
    total_function_count,
)
from .parser import parse_module
from .recipes import hardenStackCanary, instrumentCall, mutateInsertFunction
from .section_rewriter import (
    delete,
    fix_section_indices,
    insert,
    select,
    update,
)
from .semantics import fixReferences, get_last_deltas, getFuncFunctype
from .validate import (
    Diagnostic,
    ExternalResult,
    discover_validator,
    validateExternal,
    validateStructure,
)

__version__ = "0.1.0"
