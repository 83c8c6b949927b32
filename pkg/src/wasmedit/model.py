"""Object model for a parsed module.

Sections hold typed elements whose positional indices mirror the binary's
index spaces.  Function-space indices are absolute: imports occupy
0..importCount-1, so func_sec[0] has func_idx == importCount.  The same
rule applies to the global index space (imported globals count first).

Identity indices (idx / func_idx) are bookkeeping owned by the index
fixer; edits never set them by hand.
"""

from __future__ import annotations

import copy as _copy
import enum
import struct
from dataclasses import dataclass, field, fields

from .opcodes import CONST_OPS, IMMEDIATE_KIND, NAME_TO_BYTE, NATURAL_ALIGN


class _Wild:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "_"


WILD = _Wild()


class IndexSpace(enum.Enum):
    TYPE = "type"
    FUNC = "func"
    GLOBAL = "global"
    TABLE = "table"
    MEM = "mem"
    ELEM = "elem"
    DATA = "data"
    LOCAL = "local"

    def __repr__(self):
        return f"IndexSpace.{self.name}"


class SectionKind(enum.Enum):
    CUSTOM = 0
    TYPE = 1
    IMPORT = 2
    FUNC = 3
    TABLE = 4
    MEM = 5
    GLOBAL = 6
    EXPORT = 7
    START = 8
    ELEM = 9
    CODE = 10
    DATA = 11

    def __repr__(self):
        return f"SectionKind.{self.name}"


@dataclass(slots=True)
class RewriteDelta:
    """An index-space shift: indices >= pivot move by offset."""

    space: IndexSpace
    pivot: int
    offset: int
    func_idx: int | None = None  # only for LOCAL (function-scoped) deltas


@dataclass(slots=True)
class Template:
    """Per-field match patterns for select(); WILD entries match anything."""

    kind: SectionKind
    checks: tuple[tuple[str, object], ...]

    def matches(self, element) -> bool:
        return all(getattr(element, name) == want for name, want in self.checks)


def _template(cls, kind, args, kwargs):
    names = [f.name for f in fields(cls)]
    if len(args) > len(names):
        raise TypeError(f"{cls.__name__}.template takes at most {len(names)} patterns")
    patterns = dict(zip(names, args))
    for key, value in kwargs.items():
        if key not in names:
            raise TypeError(f"{cls.__name__} has no field {key!r}")
        if key in patterns:
            raise TypeError(f"duplicate pattern for {key!r}")
        patterns[key] = value
    checks = tuple((k, v) for k, v in patterns.items() if v is not WILD)
    return Template(_KIND_OF[cls] if kind is None else kind, checks)


def _fmt(value) -> str:
    """Constructor-notation formatting (double-quoted strings)."""
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, list):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, bytes):
        return f"<{len(value)} bytes>"
    return repr(value)


class Instruction:
    """One instruction: canonical mnemonic plus typed immediates.

    ``op`` may be a mnemonic, a raw opcode byte, or a "0x.." hex string.
    Immediates may be given inline (Instruction("call", 5)) or as one
    list (Instruction("call", [5])).  Defaults are filled in for
    block types (empty), memargs (natural alignment, offset 0),
    call_indirect's table (0) and memory.size/grow's memory (0).
    f32/f64 const immediates are stored as raw IEEE bit patterns; float
    arguments are converted, int arguments are taken as bits.
    """

    __slots__ = ("op", "args")

    def __init__(self, op, *args):
        if isinstance(op, int):
            name = _BYTE_TO_NAME.get(op)
            if name is None:
                raise ValueError(f"unknown opcode byte {op:#04x}")
            op = name
        elif isinstance(op, str) and op.startswith("0x"):
            name = _BYTE_TO_NAME.get(int(op, 16))
            if name is None:
                raise ValueError(f"unknown opcode byte {op}")
            op = name
        elif op not in IMMEDIATE_KIND:
            raise ValueError(f"unknown opcode mnemonic {op!r}")
        kind = IMMEDIATE_KIND[op]
        if len(args) == 1 and isinstance(args[0], list) and kind != "brtable":
            args = tuple(args[0])
        self.op = op
        self.args = self._check_args(op, kind, list(args))

    @staticmethod
    def _check_args(op, kind, args):
        if kind is None:
            if args:
                raise ValueError(f"{op} takes no immediates")
            return args
        if kind == "blocktype":
            if not args:
                return [None]
            if len(args) != 1 or args[0] not in (None, "i32", "i64", "f32", "f64"):
                raise ValueError(f"{op} takes one block type (val type or None)")
            return args
        if kind == "memarg":
            if not args:
                return [NATURAL_ALIGN[op], 0]
            if len(args) != 2:
                raise ValueError(f"{op} takes a two-part memarg: align, offset")
            return args
        if kind == "brtable":
            if len(args) != 2 or not isinstance(args[0], list):
                raise ValueError(f"{op} takes a label list and a default label")
            return [list(args[0]), args[1]]
        if kind == "callind":
            if len(args) == 1:
                return [args[0], 0]
            if len(args) != 2:
                raise ValueError(f"{op} takes a type index and a table index")
            return args
        if kind == "memidx":
            if not args:
                return [0]
            if len(args) != 1:
                raise ValueError(f"{op} takes one memory index")
            return args
        if len(args) != 1:
            raise ValueError(f"{op} takes exactly one immediate")
        value = args[0]
        if kind == "f32":
            if isinstance(value, float):
                value = struct.unpack("<I", struct.pack("<f", value))[0]
        elif kind == "f64":
            if isinstance(value, float):
                value = struct.unpack("<Q", struct.pack("<d", value))[0]
        elif kind == "i32":
            if value > 2**31 - 1 and value < 2**32:
                value -= 2**32
        elif kind == "i64":
            if value > 2**63 - 1 and value < 2**64:
                value -= 2**64
        return [value]

    @property
    def raw_opcode(self) -> int:
        return NAME_TO_BYTE[self.op]

    @property
    def immediate_kind(self) -> str | None:
        return IMMEDIATE_KIND[self.op]

    def copy(self) -> "Instruction":
        new = Instruction.__new__(Instruction)
        new.op = self.op
        new.args = [list(a) if isinstance(a, list) else a for a in self.args]
        return new

    def __eq__(self, other):
        if not isinstance(other, Instruction):
            return NotImplemented
        return self.op == other.op and self.args == other.args

    def __repr__(self):
        parts = "".join(", " + _fmt(a) for a in self.args)
        return f'Instruction("{self.op}"{parts})'


_BYTE_TO_NAME = {NAME_TO_BYTE[name]: name for name in NAME_TO_BYTE}


@dataclass(slots=True)
class ConstExpr:
    """A constant initializer expression (terminal ``end`` implied)."""

    instrs: list[Instruction] = field(default_factory=list)

    def __post_init__(self):
        if self.instrs and self.instrs[-1].op == "end":
            self.instrs = self.instrs[:-1]

    @classmethod
    def const(cls, val_type: str, value) -> "ConstExpr":
        return cls([Instruction(f"{val_type}.const", value)])

    @classmethod
    def global_get(cls, idx: int) -> "ConstExpr":
        return cls([Instruction("global.get", idx)])

    @property
    def literal(self):
        """The const value when the expression is a single const, else None."""
        if len(self.instrs) == 1 and self.instrs[0].op in CONST_OPS:
            return self.instrs[0].args[0]
        return None

    def __repr__(self):
        body = "; ".join(f"{i.op} {' '.join(map(str, i.args))}".strip() for i in self.instrs)
        return f"ConstExpr({body})"


@dataclass(slots=True)
class Local:
    """A run of ``count`` locals sharing one value type (count >= 1)."""

    count: int
    val_type: str

    def __repr__(self):
        return f'Local({self.count}, "{self.val_type}")'


@dataclass(slots=True)
class TypeElement:
    idx: int
    params: list[str] = field(default_factory=list)
    results: list[str] = field(default_factory=list)

    @classmethod
    def template(cls, *args, **kwargs) -> Template:
        return _template(cls, None, args, kwargs)

    def __repr__(self):
        return f"Type({self.idx}, {_fmt(self.params)}, {_fmt(self.results)})"


@dataclass(slots=True)
class ImportElement:
    """An import.  Function imports carry func_idx + type_idx; other kinds
    ("table", "mem", "global") keep their descriptor in desc and have
    func_idx/type_idx None."""

    func_idx: int | None
    module: str
    name: str
    type_idx: int | None
    kind: str = "func"
    desc: tuple = ()

    @classmethod
    def template(cls, *args, **kwargs) -> Template:
        # the 4-field wildcard (idx, module, name, typeIdx) means "function imports"
        if len(args) < 5 and "kind" not in kwargs:
            kwargs["kind"] = "func"
        return _template(cls, None, args, kwargs)

    def __repr__(self):
        if self.kind == "func":
            return (f"Import({self.func_idx}, {_fmt(self.module)}, "
                    f"{_fmt(self.name)}, {self.type_idx})")
        desc = ", ".join(map(str, self.desc))
        return f'Import({_fmt(self.module)}, {_fmt(self.name)}, kind="{self.kind}", {desc})'


@dataclass(slots=True)
class FunctionElement:
    func_idx: int
    type_idx: int

    @classmethod
    def template(cls, *args, **kwargs) -> Template:
        return _template(cls, None, args, kwargs)

    def __repr__(self):
        return f"Function({self.func_idx}, {self.type_idx})"


@dataclass(slots=True)
class TableElement:
    min: int
    max: int | None = None

    @classmethod
    def template(cls, *args, **kwargs) -> Template:
        return _template(cls, None, args, kwargs)

    def __repr__(self):
        return f"Table({self.min}, {self.max})"


@dataclass(slots=True)
class MemoryElement:
    min: int
    max: int | None = None

    @classmethod
    def template(cls, *args, **kwargs) -> Template:
        return _template(cls, None, args, kwargs)

    def __repr__(self):
        return f"Memory({self.min}, {self.max})"


@dataclass(slots=True)
class GlobalElement:
    idx: int
    val_type: str
    mut: int
    init: ConstExpr

    @classmethod
    def template(cls, *args, **kwargs) -> Template:
        return _template(cls, None, args, kwargs)

    def __repr__(self):
        init = self.init.literal if self.init.literal is not None else self.init
        return f"Global({self.idx}, {_fmt(self.val_type)}, {self.mut}, {init})"


@dataclass(slots=True)
class ExportElement:
    idx: int
    name: str
    kind: str  # "func" | "table" | "mem" | "global"
    target_idx: int

    @classmethod
    def template(cls, *args, **kwargs) -> Template:
        return _template(cls, None, args, kwargs)

    def __repr__(self):
        return f"Export({self.idx}, {_fmt(self.name)}, {_fmt(self.kind)}, {self.target_idx})"


@dataclass(slots=True)
class StartElement:
    func_idx: int

    @classmethod
    def template(cls, *args, **kwargs) -> Template:
        return _template(cls, None, args, kwargs)

    def __repr__(self):
        return f"Start({self.func_idx})"


@dataclass(slots=True)
class ElemElement:
    idx: int
    offset: ConstExpr
    func_idxs: list[int] = field(default_factory=list)

    @classmethod
    def template(cls, *args, **kwargs) -> Template:
        return _template(cls, None, args, kwargs)

    def __repr__(self):
        off = self.offset.literal if self.offset.literal is not None else self.offset
        return f"Elem({self.idx}, {off}, {self.func_idxs})"


@dataclass(slots=True)
class CodeElement:
    func_idx: int
    locals: list[Local] = field(default_factory=list)
    body: list[Instruction] = field(default_factory=list)

    @classmethod
    def template(cls, *args, **kwargs) -> Template:
        return _template(cls, None, args, kwargs)

    @property
    def local_types(self) -> list[str]:
        """Locals flattened to one value type per local (params excluded)."""
        out = []
        for run in self.locals:
            out.extend([run.val_type] * run.count)
        return out

    def __repr__(self):
        if len(self.body) <= 6:
            body = _fmt(self.body)
        else:
            shown = ", ".join(repr(i) for i in self.body[:5])
            body = f"[{shown}, ...(+{len(self.body) - 5})]"
        return f"Code({self.func_idx}, {_fmt(self.locals)}, {body})"


@dataclass(slots=True)
class DataElement:
    idx: int
    mem_idx: int
    offset: ConstExpr
    init: bytes = b""

    @classmethod
    def template(cls, *args, **kwargs) -> Template:
        return _template(cls, None, args, kwargs)

    def __repr__(self):
        off = self.offset.literal if self.offset.literal is not None else self.offset
        return f"Data({self.idx}, {self.mem_idx}, {off}, {_fmt(self.init)})"


@dataclass(slots=True)
class NameEntry:
    idx: int
    name: str

    def __repr__(self):
        return f"NameEntry({self.idx}, {_fmt(self.name)})"


@dataclass(slots=True)
class NameSubsection:
    """A "name" custom-section subsection: decoded entries for the idx->name
    maps we edit (function=1, global=7, data=9), raw bytes otherwise."""

    sub_id: int
    entries: list[NameEntry] | None = None
    raw: bytes = b""


FUNCTION_NAMES = 1
GLOBAL_NAMES = 7
DATA_NAMES = 9
DECODED_NAME_SUBSECTIONS = (FUNCTION_NAMES, GLOBAL_NAMES, DATA_NAMES)


@dataclass(slots=True)
class NamesData:
    subsections: list[NameSubsection] = field(default_factory=list)

    def get_map(self, sub_id: int) -> list[NameEntry] | None:
        for sub in self.subsections:
            if sub.sub_id == sub_id:
                return sub.entries
        return None

    def ensure_map(self, sub_id: int) -> list[NameEntry]:
        for sub in self.subsections:
            if sub.sub_id == sub_id:
                if sub.entries is None:
                    sub.entries = []
                return sub.entries
        new = NameSubsection(sub_id, entries=[])
        at = len(self.subsections)
        for i, sub in enumerate(self.subsections):
            if sub.sub_id > sub_id:
                at = i
                break
        self.subsections.insert(at, new)
        return new.entries

    def __repr__(self):
        parts = ", ".join(
            f"{s.sub_id}:{len(s.entries)} names" if s.entries is not None
            else f"{s.sub_id}:{len(s.raw)} bytes"
            for s in self.subsections
        )
        return f"NamesData({parts})"


@dataclass(slots=True)
class CustomElement:
    name: str
    payload: "bytes | NamesData" = b""
    after_section: int = 0  # id of the last standard section seen before it

    @classmethod
    def template(cls, *args, **kwargs) -> Template:
        return _template(cls, None, args, kwargs)

    @property
    def names(self) -> NamesData | None:
        return self.payload if isinstance(self.payload, NamesData) else None

    def __repr__(self):
        payload = repr(self.payload) if self.names else _fmt(self.payload)
        return f"Custom({_fmt(self.name)}, {payload})"


@dataclass(slots=True)
class UnknownElement:
    """A section with an id outside 0..11, preserved verbatim."""

    section_id: int
    payload: bytes = b""
    after_section: int = 0

    def __repr__(self):
        return f"Unknown(id={self.section_id}, {_fmt(self.payload)})"


@dataclass(eq=True)
class Module:
    type_sec: list[TypeElement] = field(default_factory=list)
    import_sec: list[ImportElement] = field(default_factory=list)
    func_sec: list[FunctionElement] = field(default_factory=list)
    table_sec: list[TableElement] = field(default_factory=list)
    mem_sec: list[MemoryElement] = field(default_factory=list)
    global_sec: list[GlobalElement] = field(default_factory=list)
    export_sec: list[ExportElement] = field(default_factory=list)
    start_sec: StartElement | None = None
    elem_sec: list[ElemElement] = field(default_factory=list)
    code_sec: list[CodeElement] = field(default_factory=list)
    data_sec: list[DataElement] = field(default_factory=list)
    custom_secs: list[CustomElement] = field(default_factory=list)
    unknown_secs: list[UnknownElement] = field(default_factory=list)
    _edit_count: int = field(default=0, compare=False, repr=False)
    # indexed-element counts as of the last renumber; lets the fixer see
    # deletions at the tail of a section (no survivor skips over those)
    _index_extents: dict = field(default_factory=dict, compare=False, repr=False)

    def touch(self) -> None:
        """Record a structural edit (invalidates live selections)."""
        self._edit_count += 1

    def copy(self) -> "Module":
        return _copy.deepcopy(self)

    def imported_function_count(self) -> int:
        return sum(1 for imp in self.import_sec if imp.kind == "func")

    def imported_global_count(self) -> int:
        return sum(1 for imp in self.import_sec if imp.kind == "global")

    def imported_table_count(self) -> int:
        return sum(1 for imp in self.import_sec if imp.kind == "table")

    def imported_memory_count(self) -> int:
        return sum(1 for imp in self.import_sec if imp.kind == "mem")

    def global_count(self) -> int:
        return self.imported_global_count() + len(self.global_sec)

    def table_count(self) -> int:
        return self.imported_table_count() + len(self.table_sec)

    def memory_count(self) -> int:
        return self.imported_memory_count() + len(self.mem_sec)

    def name_section(self) -> CustomElement | None:
        for custom in self.custom_secs:
            if custom.name == "name" and custom.names is not None:
                return custom
        return None

    def __repr__(self):
        parts = []
        for label, sec in (
            ("types", self.type_sec), ("imports", self.import_sec),
            ("funcs", self.func_sec), ("tables", self.table_sec),
            ("mems", self.mem_sec), ("globals", self.global_sec),
            ("exports", self.export_sec), ("elems", self.elem_sec),
            ("codes", self.code_sec), ("datas", self.data_sec),
            ("customs", self.custom_secs),
        ):
            if sec:
                parts.append(f"{label}={len(sec)}")
        if self.start_sec is not None:
            parts.append(f"start={self.start_sec.func_idx}")
        return f"Module({', '.join(parts)})"


@dataclass(slots=True)
class ResolvedFunction:
    kind: str  # "import" | "internal"
    type_idx: int
    code: CodeElement | None
    import_elem: ImportElement | None
    position: int  # position within its section


def total_function_count(module: Module) -> int:
    return module.imported_function_count() + len(module.func_sec)


def resolve_function(module: Module, func_idx: int) -> ResolvedFunction:
    """Map an absolute function index to its import or its code."""
    import_count = module.imported_function_count()
    if func_idx < 0 or func_idx >= total_function_count(module):
        raise IndexError(
            f"function index space has {total_function_count(module)} entries; "
            f"no index {func_idx}"
        )
    if func_idx < import_count:
        seen = 0
        for pos, imp in enumerate(module.import_sec):
            if imp.kind == "func":
                if seen == func_idx:
                    return ResolvedFunction("import", imp.type_idx, None, imp, pos)
                seen += 1
    pos = func_idx - import_count
    return ResolvedFunction(
        "internal", module.func_sec[pos].type_idx, module.code_sec[pos], None, pos
    )


_KIND_OF = {
    TypeElement: SectionKind.TYPE,
    ImportElement: SectionKind.IMPORT,
    FunctionElement: SectionKind.FUNC,
    TableElement: SectionKind.TABLE,
    MemoryElement: SectionKind.MEM,
    GlobalElement: SectionKind.GLOBAL,
    ExportElement: SectionKind.EXPORT,
    StartElement: SectionKind.START,
    ElemElement: SectionKind.ELEM,
    CodeElement: SectionKind.CODE,
    DataElement: SectionKind.DATA,
    CustomElement: SectionKind.CUSTOM,
}


@dataclass(frozen=True, slots=True)
class SectionInfo:
    attr: str
    element_cls: type
    idx_field: str | None
    section_id: int


SECTION_INFO = {
    SectionKind.TYPE: SectionInfo("type_sec", TypeElement, "idx", 1),
    SectionKind.IMPORT: SectionInfo("import_sec", ImportElement, "func_idx", 2),
    SectionKind.FUNC: SectionInfo("func_sec", FunctionElement, "func_idx", 3),
    SectionKind.TABLE: SectionInfo("table_sec", TableElement, None, 4),
    SectionKind.MEM: SectionInfo("mem_sec", MemoryElement, None, 5),
    SectionKind.GLOBAL: SectionInfo("global_sec", GlobalElement, "idx", 6),
    SectionKind.EXPORT: SectionInfo("export_sec", ExportElement, "idx", 7),
    SectionKind.START: SectionInfo("start_sec", StartElement, None, 8),
    SectionKind.ELEM: SectionInfo("elem_sec", ElemElement, "idx", 9),
    SectionKind.CODE: SectionInfo("code_sec", CodeElement, "func_idx", 10),
    SectionKind.DATA: SectionInfo("data_sec", DataElement, "idx", 11),
    SectionKind.CUSTOM: SectionInfo("custom_secs", CustomElement, None, 0),
}

# fields assigned by the index fixer, rejected by update()
IDENTITY_FIELDS = {
    TypeElement: ("idx",),
    ImportElement: ("func_idx",),
    FunctionElement: ("func_idx",),
    GlobalElement: ("idx",),
    ExportElement: ("idx",),
    ElemElement: ("idx",),
    CodeElement: ("func_idx",),
    DataElement: ("idx",),
}
