"""Model-to-binary encoder.

Output is normalized: minimal-width varints, standard section order
(custom and unknown sections re-emitted after their recorded anchor
section), empty sections omitted, and adjacent same-type local runs
merged.  encode(parse(encode(m))) == encode(m) for any encodable m.
"""

import struct

from .errors import EncodeError
from .model import ConstExpr, CustomElement, Instruction, Module, NamesData
from .opcodes import (
    EMPTY_BLOCK_BYTE,
    FUNC_TYPE_BYTE,
    FUNCREF_BYTE,
    IMMEDIATE_KIND,
    NAME_TO_BYTE,
    VAL_TYPE_BYTES,
)
from .parser import MAGIC, VERSION

_EXPORT_KIND_BYTES = {"func": 0, "table": 1, "mem": 2, "global": 3}


def _uleb(out: bytearray, value: int) -> None:
    if value < 0:
        raise EncodeError(f"negative value {value} where an index/count belongs")
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return


def _sleb(out: bytearray, value: int, bits: int) -> None:
    if value < -(1 << (bits - 1)) or value >= (1 << (bits - 1)):
        raise OverflowError(f"{value} out of range for signed {bits}-bit immediate")
    while True:
        byte = value & 0x7F
        value >>= 7
        if (value == 0 and not byte & 0x40) or (value == -1 and byte & 0x40):
            out.append(byte)
            return
        out.append(byte | 0x80)


def _name(out: bytearray, text: str) -> None:
    raw = text.encode("utf-8")
    _uleb(out, len(raw))
    out += raw


def _val_type(out: bytearray, name: str) -> None:
    byte = VAL_TYPE_BYTES.get(name)
    if byte is None:
        raise EncodeError(f"unknown value type {name!r}")
    out.append(byte)


def _limits(out: bytearray, minimum: int, maximum: int | None) -> None:
    if maximum is None:
        out.append(0)
        _uleb(out, minimum)
    else:
        out.append(1)
        _uleb(out, minimum)
        _uleb(out, maximum)


def _instruction(out: bytearray, ins: Instruction) -> None:
    opcode = NAME_TO_BYTE.get(ins.op)
    if opcode is None:
        raise EncodeError(f"unknown opcode mnemonic {ins.op!r}")
    out.append(opcode)
    kind = IMMEDIATE_KIND[ins.op]
    args = ins.args
    if kind is None:
        return
    if kind == "memarg":
        _uleb(out, args[0])
        _uleb(out, args[1])
    elif kind in ("labelidx", "funcidx", "localidx", "globalidx", "memidx"):
        _uleb(out, args[0])
    elif kind == "i32":
        _sleb(out, args[0], 32)
    elif kind == "i64":
        _sleb(out, args[0], 64)
    elif kind == "f32":
        out += struct.pack("<I", args[0] & 0xFFFFFFFF)
    elif kind == "f64":
        out += struct.pack("<Q", args[0] & 0xFFFFFFFFFFFFFFFF)
    elif kind == "blocktype":
        if args[0] is None:
            out.append(EMPTY_BLOCK_BYTE)
        else:
            _val_type(out, args[0])
    elif kind == "brtable":
        labels, default = args
        _uleb(out, len(labels))
        for label in labels:
            _uleb(out, label)
        _uleb(out, default)
    elif kind == "callind":
        _uleb(out, args[0])
        _uleb(out, args[1])
    else:
        raise AssertionError(kind)


def _expr(out: bytearray, expr: ConstExpr) -> None:
    for ins in expr.instrs:
        _instruction(out, ins)
    out.append(NAME_TO_BYTE["end"])


def _merge_locals(locals_) -> list:
    merged = []
    for run in locals_:
        if run.count == 0:
            continue
        if merged and merged[-1][1] == run.val_type:
            merged[-1][0] += run.count
        else:
            merged.append([run.count, run.val_type])
    return merged


def _names_payload(names: NamesData) -> bytes:
    out = bytearray()
    for sub in names.subsections:
        body = bytearray()
        if sub.entries is not None:
            _uleb(body, len(sub.entries))
            for entry in sub.entries:
                _uleb(body, entry.idx)
                _name(body, entry.name)
        else:
            body += sub.raw
        out.append(sub.sub_id)
        _uleb(out, len(body))
        out += body
    return bytes(out)


def _custom_payload(custom: CustomElement) -> bytes:
    out = bytearray()
    _name(out, custom.name)
    if isinstance(custom.payload, NamesData):
        out += _names_payload(custom.payload)
    elif isinstance(custom.payload, bytes):
        out += custom.payload
    else:
        raise EncodeError(f"custom section {custom.name!r} payload must be bytes")
    return bytes(out)


def _section(out: bytearray, section_id: int, payload: bytes) -> None:
    out.append(section_id)
    _uleb(out, len(payload))
    out += payload


def encode_module(module: Module) -> bytes:
    anchored: dict[int, list] = {}
    for custom in module.custom_secs:
        anchored.setdefault(custom.after_section, []).append((0, custom))
    for unknown in module.unknown_secs:
        anchored.setdefault(unknown.after_section, []).append(
            (unknown.section_id, unknown)
        )

    out = bytearray(MAGIC + VERSION)

    def flush_anchor(anchor: int) -> None:
        for section_id, item in anchored.pop(anchor, ()):
            if section_id == 0:
                _section(out, 0, _custom_payload(item))
            else:
                _section(out, section_id, item.payload)

    flush_anchor(0)

    if module.type_sec:
        body = bytearray()
        _uleb(body, len(module.type_sec))
        for t in module.type_sec:
            body.append(FUNC_TYPE_BYTE)
            _uleb(body, len(t.params))
            for p in t.params:
                _val_type(body, p)
            _uleb(body, len(t.results))
            for res in t.results:
                _val_type(body, res)
        _section(out, 1, bytes(body))
    flush_anchor(1)

    if module.import_sec:
        body = bytearray()
        _uleb(body, len(module.import_sec))
        for imp in module.import_sec:
            _name(body, imp.module)
            _name(body, imp.name)
            if imp.kind == "func":
                body.append(0)
                _uleb(body, imp.type_idx)
            elif imp.kind == "table":
                body.append(1)
                body.append(FUNCREF_BYTE)
                _limits(body, imp.desc[1], imp.desc[2])
            elif imp.kind == "mem":
                body.append(2)
                _limits(body, imp.desc[0], imp.desc[1])
            elif imp.kind == "global":
                body.append(3)
                _val_type(body, imp.desc[0])
                body.append(imp.desc[1])
            else:
                raise EncodeError(f"unknown import kind {imp.kind!r}")
        _section(out, 2, bytes(body))
    flush_anchor(2)

    if module.func_sec:
        body = bytearray()
        _uleb(body, len(module.func_sec))
        for fn in module.func_sec:
            _uleb(body, fn.type_idx)
        _section(out, 3, bytes(body))
    flush_anchor(3)

    if module.table_sec:
        body = bytearray()
        _uleb(body, len(module.table_sec))
        for table in module.table_sec:
            body.append(FUNCREF_BYTE)
            _limits(body, table.min, table.max)
        _section(out, 4, bytes(body))
    flush_anchor(4)

    if module.mem_sec:
        body = bytearray()
        _uleb(body, len(module.mem_sec))
        for mem in module.mem_sec:
            _limits(body, mem.min, mem.max)
        _section(out, 5, bytes(body))
    flush_anchor(5)

    if module.global_sec:
        body = bytearray()
        _uleb(body, len(module.global_sec))
        for g in module.global_sec:
            _val_type(body, g.val_type)
            if g.mut not in (0, 1):
                raise EncodeError(f"global mut flag must be 0 or 1, got {g.mut!r}")
            body.append(g.mut)
            _expr(body, g.init)
        _section(out, 6, bytes(body))
    flush_anchor(6)

    if module.export_sec:
        body = bytearray()
        _uleb(body, len(module.export_sec))
        for ex in module.export_sec:
            _name(body, ex.name)
            kind = _EXPORT_KIND_BYTES.get(ex.kind)
            if kind is None:
                raise EncodeError(f"unknown export kind {ex.kind!r}")
            body.append(kind)
            _uleb(body, ex.target_idx)
        _section(out, 7, bytes(body))
    flush_anchor(7)

    if module.start_sec is not None:
        body = bytearray()
        _uleb(body, module.start_sec.func_idx)
        _section(out, 8, bytes(body))
    flush_anchor(8)

    if module.elem_sec:
        body = bytearray()
        _uleb(body, len(module.elem_sec))
        for elem in module.elem_sec:
            _uleb(body, 0)
            _expr(body, elem.offset)
            _uleb(body, len(elem.func_idxs))
            for func_idx in elem.func_idxs:
                _uleb(body, func_idx)
        _section(out, 9, bytes(body))
    flush_anchor(9)

    if module.code_sec:
        body = bytearray()
        _uleb(body, len(module.code_sec))
        for code in module.code_sec:
            entry = bytearray()
            merged = _merge_locals(code.locals)
            _uleb(entry, len(merged))
            for count, val_type in merged:
                _uleb(entry, count)
                _val_type(entry, val_type)
            if not code.body or code.body[-1].op != "end":
                raise EncodeError(
                    f"function {code.func_idx} body does not end with `end`"
                )
            for ins in code.body:
                _instruction(entry, ins)
            _uleb(body, len(entry))
            body += entry
        _section(out, 10, bytes(body))
    flush_anchor(10)

    if module.data_sec:
        body = bytearray()
        _uleb(body, len(module.data_sec))
        for seg in module.data_sec:
            _uleb(body, seg.mem_idx)
            _expr(body, seg.offset)
            _uleb(body, len(seg.init))
            body += seg.init
        _section(out, 11, bytes(body))
    flush_anchor(11)

    # anchors whose section id no longer exists still get flushed
    for anchor in sorted(anchored):
        flush_anchor(anchor)

    return bytes(out)
