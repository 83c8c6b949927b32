"""Binary-to-model decoder for core v1 modules.

parse_module is strict about the format (bad magic, truncation, section
size mismatches and unknown opcodes raise) but tolerant about oddities
that have a faithful model representation: duplicate or out-of-order
known sections are merged with a warning, zero-count local runs are
dropped, and a malformed "name" custom section degrades to an opaque
payload instead of failing the parse.
"""

from dataclasses import dataclass, field

from .errors import FormatError, TruncatedError
from .leb128 import (
    decode_sleb128,
    decode_uleb128,
    min_sleb128_size,
    min_uleb128_size,
)
from .model import (
    DECODED_NAME_SUBSECTIONS,
    CodeElement,
    ConstExpr,
    CustomElement,
    DataElement,
    ElemElement,
    ExportElement,
    FunctionElement,
    GlobalElement,
    ImportElement,
    Instruction,
    Local,
    MemoryElement,
    Module,
    NameEntry,
    NamesData,
    NameSubsection,
    SectionKind,
    StartElement,
    TableElement,
    TypeElement,
    UnknownElement,
)
from .opcodes import (
    BYTE_TO_NAME,
    EMPTY_BLOCK_BYTE,
    FUNC_TYPE_BYTE,
    FUNCREF_BYTE,
    IMMEDIATE_KIND,
    VAL_TYPES,
)

MAGIC = b"\x00asm"
VERSION = b"\x01\x00\x00\x00"

_EXPORT_KINDS = {0: "func", 1: "table", 2: "mem", 3: "global"}


@dataclass(slots=True)
class ParseDiagnostics:
    """Non-fatal observations made while decoding."""

    warnings: list[tuple[int, str]] = field(default_factory=list)
    non_minimal_leb_count: int = 0


class _Reader:
    __slots__ = ("data", "pos", "diag")

    def __init__(self, data: bytes, diag: ParseDiagnostics, pos: int = 0):
        self.data = data
        self.pos = pos
        self.diag = diag

    def byte(self) -> int:
        if self.pos >= len(self.data):
            raise TruncatedError("input ended inside a section", self.pos)
        b = self.data[self.pos]
        self.pos += 1
        return b

    def take(self, n: int) -> bytes:
        end = self.pos + n
        if end > len(self.data):
            raise TruncatedError(f"{n} bytes expected", self.pos)
        out = self.data[self.pos : end]
        self.pos = end
        return out

    def u32(self) -> int:
        value, size = decode_uleb128(self.data, self.pos, 32)
        if size > min_uleb128_size(value):
            self.diag.non_minimal_leb_count += 1
        self.pos += size
        return value

    def s32(self) -> int:
        value, size = decode_sleb128(self.data, self.pos, 32)
        if size > min_sleb128_size(value):
            self.diag.non_minimal_leb_count += 1
        self.pos += size
        return value

    def s64(self) -> int:
        value, size = decode_sleb128(self.data, self.pos, 64)
        if size > min_sleb128_size(value):
            self.diag.non_minimal_leb_count += 1
        self.pos += size
        return value

    def name(self) -> str:
        length = self.u32()
        raw = self.take(length)
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"invalid UTF-8 name: {exc}", self.pos - length) from None

    def val_type(self) -> str:
        b = self.byte()
        try:
            return VAL_TYPES[b]
        except KeyError:
            raise FormatError(f"unknown value type byte {b:#04x}", self.pos - 1) from None

    def limits(self) -> tuple[int, int | None]:
        flag = self.byte()
        if flag == 0:
            return self.u32(), None
        if flag == 1:
            minimum = self.u32()
            return minimum, self.u32()
        raise FormatError(f"unknown limits flag {flag:#04x}", self.pos - 1)


def _instruction(op: str, args: list) -> Instruction:
    ins = Instruction.__new__(Instruction)
    ins.op = op
    ins.args = args
    return ins


def _read_instruction(r: _Reader) -> Instruction:
    at = r.pos
    opcode = r.byte()
    name = BYTE_TO_NAME.get(opcode)
    if name is None:
        raise FormatError(f"unsupported opcode byte {opcode:#04x}", at)
    kind = IMMEDIATE_KIND[name]
    if kind is None:
        return _instruction(name, [])
    if kind == "memarg":
        return _instruction(name, [r.u32(), r.u32()])
    if kind in ("labelidx", "funcidx", "localidx", "globalidx"):
        return _instruction(name, [r.u32()])
    if kind == "i32":
        return _instruction(name, [r.s32()])
    if kind == "i64":
        return _instruction(name, [r.s64()])
    if kind == "f32":
        return _instruction(name, [int.from_bytes(r.take(4), "little")])
    if kind == "f64":
        return _instruction(name, [int.from_bytes(r.take(8), "little")])
    if kind == "blocktype":
        b = r.byte()
        if b == EMPTY_BLOCK_BYTE:
            return _instruction(name, [None])
        if b in VAL_TYPES:
            return _instruction(name, [VAL_TYPES[b]])
        raise FormatError(f"unsupported block type byte {b:#04x}", r.pos - 1)
    if kind == "brtable":
        labels = [r.u32() for _ in range(r.u32())]
        return _instruction(name, [labels, r.u32()])
    if kind == "callind":
        return _instruction(name, [r.u32(), r.u32()])
    if kind == "memidx":
        return _instruction(name, [r.u32()])
    raise AssertionError(kind)


def _read_expr(r: _Reader) -> ConstExpr:
    """Read instructions up to the matching top-level ``end``."""
    instrs = []
    depth = 0
    while True:
        ins = _read_instruction(r)
        if ins.op == "end":
            if depth == 0:
                return ConstExpr(instrs)
            depth -= 1
        elif ins.op in ("block", "loop", "if"):
            depth += 1
        instrs.append(ins)


def _read_code_entry(r: _Reader, payload_end: int) -> tuple[list[Local], list[Instruction]]:
    locals_ = []
    for _ in range(r.u32()):
        count = r.u32()
        val_type = r.val_type()
        if count == 0:
            r.diag.warnings.append((r.pos, "zero-count local run dropped"))
            continue
        locals_.append(Local(count, val_type))
    body = []
    while r.pos < payload_end:
        body.append(_read_instruction(r))
    if not body or body[-1].op != "end":
        raise FormatError("function body does not end with `end`", r.pos)
    return locals_, body


def _decode_names(payload: bytes, diag: ParseDiagnostics) -> NamesData:
    sub_diag = ParseDiagnostics()
    r = _Reader(payload, sub_diag)
    subsections = []
    last_id = -1
    while r.pos < len(payload):
        sub_id = r.byte()
        size = r.u32()
        end = r.pos + size
        if end > len(payload):
            raise TruncatedError("name subsection overruns section", r.pos)
        if sub_id <= last_id:
            raise FormatError("name subsections out of order", r.pos)
        last_id = sub_id
        if sub_id in DECODED_NAME_SUBSECTIONS:
            entries = []
            for _ in range(r.u32()):
                idx = r.u32()
                entries.append(NameEntry(idx, r.name()))
            if r.pos != end:
                raise FormatError("name subsection size mismatch", r.pos)
            subsections.append(NameSubsection(sub_id, entries=entries))
        else:
            subsections.append(NameSubsection(sub_id, raw=bytes(r.take(size))))
    diag.non_minimal_leb_count += sub_diag.non_minimal_leb_count
    diag.warnings.extend(sub_diag.warnings)
    return NamesData(subsections)


def parse_module(data: bytes) -> tuple[Module, ParseDiagnostics]:
    """Decode ``data`` into a Module plus parse diagnostics."""
    diag = ParseDiagnostics()
    if len(data) < 8:
        raise TruncatedError("shorter than the 8-byte header", len(data))
    if data[:4] != MAGIC:
        raise FormatError("missing \\x00asm magic", 0)
    if data[4:8] != VERSION:
        raise FormatError(f"unsupported version {data[4:8].hex()}", 4)

    module = Module()
    r = _Reader(data, diag, 8)
    seen_ids = set()
    last_id = 0
    while r.pos < len(data):
        section_at = r.pos
        section_id = r.byte()
        size = r.u32()
        payload_end = r.pos + size
        if payload_end > len(data):
            raise TruncatedError(f"section {section_id} overruns the input", section_at)

        if section_id == 0:
            name_at = r.pos
            name = r.name()
            payload = bytes(data[r.pos : payload_end])
            r.pos = payload_end
            decoded: bytes | NamesData = payload
            if name == "name":
                try:
                    decoded = _decode_names(payload, diag)
                except FormatError as exc:
                    diag.warnings.append(
                        (name_at, f"undecodable name section kept as raw bytes: {exc}")
                    )
            module.custom_secs.append(CustomElement(name, decoded, after_section=last_id))
            continue

        if section_id > 11:
            payload = bytes(data[r.pos : payload_end])
            r.pos = payload_end
            module.unknown_secs.append(
                UnknownElement(section_id, payload, after_section=last_id)
            )
            continue

        if section_id in seen_ids:
            diag.warnings.append((section_at, f"duplicate section id {section_id} merged"))
        elif section_id < last_id:
            diag.warnings.append((section_at, f"section id {section_id} out of order"))
        seen_ids.add(section_id)

        if section_id == 1:
            for _ in range(r.u32()):
                at = r.pos
                if r.byte() != FUNC_TYPE_BYTE:
                    raise FormatError("function type must begin with 0x60", at)
                params = [r.val_type() for _ in range(r.u32())]
                results = [r.val_type() for _ in range(r.u32())]
                module.type_sec.append(TypeElement(-1, params, results))
        elif section_id == 2:
            for _ in range(r.u32()):
                mod_name = r.name()
                item_name = r.name()
                kind = r.byte()
                if kind == 0:
                    module.import_sec.append(
                        ImportElement(-1, mod_name, item_name, r.u32())
                    )
                elif kind == 1:
                    at = r.pos
                    if r.byte() != FUNCREF_BYTE:
                        raise FormatError("table element type must be funcref", at)
                    minimum, maximum = r.limits()
                    module.import_sec.append(
                        ImportElement(None, mod_name, item_name, None, "table",
                                      ("funcref", minimum, maximum))
                    )
                elif kind == 2:
                    minimum, maximum = r.limits()
                    module.import_sec.append(
                        ImportElement(None, mod_name, item_name, None, "mem",
                                      (minimum, maximum))
                    )
                elif kind == 3:
                    val_type = r.val_type()
                    mut = r.byte()
                    if mut > 1:
                        raise FormatError(f"invalid mutability flag {mut}", r.pos - 1)
                    module.import_sec.append(
                        ImportElement(None, mod_name, item_name, None, "global",
                                      (val_type, mut))
                    )
                else:
                    raise FormatError(f"unknown import kind {kind:#04x}", r.pos - 1)
        elif section_id == 3:
            for _ in range(r.u32()):
                module.func_sec.append(FunctionElement(-1, r.u32()))
        elif section_id == 4:
            for _ in range(r.u32()):
                at = r.pos
                if r.byte() != FUNCREF_BYTE:
                    raise FormatError("table element type must be funcref", at)
                minimum, maximum = r.limits()
                module.table_sec.append(TableElement(minimum, maximum))
        elif section_id == 5:
            for _ in range(r.u32()):
                minimum, maximum = r.limits()
                module.mem_sec.append(MemoryElement(minimum, maximum))
        elif section_id == 6:
            for _ in range(r.u32()):
                val_type = r.val_type()
                mut = r.byte()
                if mut > 1:
                    raise FormatError(f"invalid mutability flag {mut}", r.pos - 1)
                module.global_sec.append(GlobalElement(-1, val_type, mut, _read_expr(r)))
        elif section_id == 7:
            for _ in range(r.u32()):
                name = r.name()
                kind = r.byte()
                if kind not in _EXPORT_KINDS:
                    raise FormatError(f"unknown export kind {kind:#04x}", r.pos - 1)
                module.export_sec.append(
                    ExportElement(-1, name, _EXPORT_KINDS[kind], r.u32())
                )
        elif section_id == 8:
            start = StartElement(r.u32())
            if module.start_sec is not None:
                diag.warnings.append((section_at, "duplicate start section replaced"))
            module.start_sec = start
        elif section_id == 9:
            for _ in range(r.u32()):
                at = r.pos
                table_idx = r.u32()
                if table_idx != 0:
                    raise FormatError(
                        f"unsupported element segment form {table_idx}", at
                    )
                offset = _read_expr(r)
                func_idxs = [r.u32() for _ in range(r.u32())]
                module.elem_sec.append(ElemElement(-1, offset, func_idxs))
        elif section_id == 10:
            for _ in range(r.u32()):
                body_size = r.u32()
                body_end = r.pos + body_size
                if body_end > payload_end:
                    raise TruncatedError("code entry overruns section", r.pos)
                locals_, body = _read_code_entry(r, body_end)
                if r.pos != body_end:
                    raise FormatError("code entry size mismatch", r.pos)
                module.code_sec.append(CodeElement(-1, locals_, body))
        elif section_id == 11:
            for _ in range(r.u32()):
                at = r.pos
                mem_idx = r.u32()
                if mem_idx != 0:
                    raise FormatError(f"unsupported data segment form {mem_idx}", at)
                offset = _read_expr(r)
                init = bytes(r.take(r.u32()))
                module.data_sec.append(DataElement(-1, mem_idx, offset, init))

        if r.pos != payload_end:
            raise FormatError(
                f"section {section_id} declared {size} bytes, "
                f"consumed {r.pos - (payload_end - size)}", section_at,
            )
        last_id = section_id

    renumber_identity(module)
    return module, diag


def renumber_identity(module: Module) -> None:
    """Assign identity idx fields from section positions and import counts."""
    for pos, elem in enumerate(module.type_sec):
        elem.idx = pos
    func_seen = 0
    for imp in module.import_sec:
        if imp.kind == "func":
            imp.func_idx = func_seen
            func_seen += 1
        else:
            imp.func_idx = None
    for pos, elem in enumerate(module.func_sec):
        elem.func_idx = func_seen + pos
    for pos, elem in enumerate(module.code_sec):
        elem.func_idx = func_seen + pos
    global_base = module.imported_global_count()
    for pos, elem in enumerate(module.global_sec):
        elem.idx = global_base + pos
    for pos, elem in enumerate(module.export_sec):
        elem.idx = pos
    for pos, elem in enumerate(module.elem_sec):
        elem.idx = pos
    for pos, elem in enumerate(module.data_sec):
        elem.idx = pos
    module._index_extents = {
        SectionKind.TYPE: len(module.type_sec),
        SectionKind.IMPORT: func_seen,
        SectionKind.FUNC: len(module.func_sec),
        SectionKind.CODE: len(module.code_sec),
        SectionKind.GLOBAL: len(module.global_sec),
        SectionKind.ELEM: len(module.elem_sec),
        SectionKind.DATA: len(module.data_sec),
    }
