"""Core v1 (MVP) opcode table: byte <-> mnemonic plus immediate shape.

Immediate kinds:
    None        no immediates
    "blocktype" one entry: "i32"/"i64"/"f32"/"f64" or None for empty
    "labelidx"  one u32 label depth
    "brtable"   two entries: list of label depths, default depth
    "funcidx"   one u32 function index
    "callind"   two entries: type index, table index
    "localidx"  one u32 local index
    "globalidx" one u32 global index
    "memarg"    two entries: align (log2), offset
    "memidx"    one memory index (0 in v1)
    "i32"/"i64" one signed const
    "f32"/"f64" one const stored as raw IEEE bits (int)
"""

VAL_TYPES = {0x7F: "i32", 0x7E: "i64", 0x7D: "f32", 0x7C: "f64"}
VAL_TYPE_BYTES = {name: byte for byte, name in VAL_TYPES.items()}

FUNC_TYPE_BYTE = 0x60
FUNCREF_BYTE = 0x70
EMPTY_BLOCK_BYTE = 0x40

_OPS = [
    (0x00, "unreachable", None),
    (0x01, "nop", None),
    (0x02, "block", "blocktype"),
    (0x03, "loop", "blocktype"),
    (0x04, "if", "blocktype"),
    (0x05, "else", None),
    (0x0B, "end", None),
    (0x0C, "br", "labelidx"),
    (0x0D, "br_if", "labelidx"),
    (0x0E, "br_table", "brtable"),
    (0x0F, "return", None),
    (0x10, "call", "funcidx"),
    (0x11, "call_indirect", "callind"),
    (0x1A, "drop", None),
    (0x1B, "select", None),
    (0x20, "local.get", "localidx"),
    (0x21, "local.set", "localidx"),
    (0x22, "local.tee", "localidx"),
    (0x23, "global.get", "globalidx"),
    (0x24, "global.set", "globalidx"),
    (0x28, "i32.load", "memarg"),
    (0x29, "i64.load", "memarg"),
    (0x2A, "f32.load", "memarg"),
    (0x2B, "f64.load", "memarg"),
    (0x2C, "i32.load8_s", "memarg"),
    (0x2D, "i32.load8_u", "memarg"),
    (0x2E, "i32.load16_s", "memarg"),
    (0x2F, "i32.load16_u", "memarg"),
    (0x30, "i64.load8_s", "memarg"),
    (0x31, "i64.load8_u", "memarg"),
    (0x32, "i64.load16_s", "memarg"),
    (0x33, "i64.load16_u", "memarg"),
    (0x34, "i64.load32_s", "memarg"),
    (0x35, "i64.load32_u", "memarg"),
    (0x36, "i32.store", "memarg"),
    (0x37, "i64.store", "memarg"),
    (0x38, "f32.store", "memarg"),
    (0x39, "f64.store", "memarg"),
    (0x3A, "i32.store8", "memarg"),
    (0x3B, "i32.store16", "memarg"),
    (0x3C, "i64.store8", "memarg"),
    (0x3D, "i64.store16", "memarg"),
    (0x3E, "i64.store32", "memarg"),
    (0x3F, "memory.size", "memidx"),
    (0x40, "memory.grow", "memidx"),
    (0x41, "i32.const", "i32"),
    (0x42, "i64.const", "i64"),
    (0x43, "f32.const", "f32"),
    (0x44, "f64.const", "f64"),
    (0x45, "i32.eqz", None),
    (0x46, "i32.eq", None),
    (0x47, "i32.ne", None),
    (0x48, "i32.lt_s", None),
    (0x49, "i32.lt_u", None),
    (0x4A, "i32.gt_s", None),
    (0x4B, "i32.gt_u", None),
    (0x4C, "i32.le_s", None),
    (0x4D, "i32.le_u", None),
    (0x4E, "i32.ge_s", None),
    (0x4F, "i32.ge_u", None),
    (0x50, "i64.eqz", None),
    (0x51, "i64.eq", None),
    (0x52, "i64.ne", None),
    (0x53, "i64.lt_s", None),
    (0x54, "i64.lt_u", None),
    (0x55, "i64.gt_s", None),
    (0x56, "i64.gt_u", None),
    (0x57, "i64.le_s", None),
    (0x58, "i64.le_u", None),
    (0x59, "i64.ge_s", None),
    (0x5A, "i64.ge_u", None),
    (0x5B, "f32.eq", None),
    (0x5C, "f32.ne", None),
    (0x5D, "f32.lt", None),
    (0x5E, "f32.gt", None),
    (0x5F, "f32.le", None),
    (0x60, "f32.ge", None),
    (0x61, "f64.eq", None),
    (0x62, "f64.ne", None),
    (0x63, "f64.lt", None),
    (0x64, "f64.gt", None),
    (0x65, "f64.le", None),
    (0x66, "f64.ge", None),
    (0x67, "i32.clz", None),
    (0x68, "i32.ctz", None),
    (0x69, "i32.popcnt", None),
    (0x6A, "i32.add", None),
    (0x6B, "i32.sub", None),
    (0x6C, "i32.mul", None),
    (0x6D, "i32.div_s", None),
    (0x6E, "i32.div_u", None),
    (0x6F, "i32.rem_s", None),
    (0x70, "i32.rem_u", None),
    (0x71, "i32.and", None),
    (0x72, "i32.or", None),
    (0x73, "i32.xor", None),
    (0x74, "i32.shl", None),
    (0x75, "i32.shr_s", None),
    (0x76, "i32.shr_u", None),
    (0x77, "i32.rotl", None),
    (0x78, "i32.rotr", None),
    (0x79, "i64.clz", None),
    (0x7A, "i64.ctz", None),
    (0x7B, "i64.popcnt", None),
    (0x7C, "i64.add", None),
    (0x7D, "i64.sub", None),
    (0x7E, "i64.mul", None),
    (0x7F, "i64.div_s", None),
    (0x80, "i64.div_u", None),
    (0x81, "i64.rem_s", None),
    (0x82, "i64.rem_u", None),
    (0x83, "i64.and", None),
    (0x84, "i64.or", None),
    (0x85, "i64.xor", None),
    (0x86, "i64.shl", None),
    (0x87, "i64.shr_s", None),
    (0x88, "i64.shr_u", None),
    (0x89, "i64.rotl", None),
    (0x8A, "i64.rotr", None),
    (0x8B, "f32.abs", None),
    (0x8C, "f32.neg", None),
    (0x8D, "f32.ceil", None),
    (0x8E, "f32.floor", None),
    (0x8F, "f32.trunc", None),
    (0x90, "f32.nearest", None),
    (0x91, "f32.sqrt", None),
    (0x92, "f32.add", None),
    (0x93, "f32.sub", None),
    (0x94, "f32.mul", None),
    (0x95, "f32.div", None),
    (0x96, "f32.min", None),
    (0x97, "f32.max", None),
    (0x98, "f32.copysign", None),
    (0x99, "f64.abs", None),
    (0x9A, "f64.neg", None),
    (0x9B, "f64.ceil", None),
    (0x9C, "f64.floor", None),
    (0x9D, "f64.trunc", None),
    (0x9E, "f64.nearest", None),
    (0x9F, "f64.sqrt", None),
    (0xA0, "f64.add", None),
    (0xA1, "f64.sub", None),
    (0xA2, "f64.mul", None),
    (0xA3, "f64.div", None),
    (0xA4, "f64.min", None),
    (0xA5, "f64.max", None),
    (0xA6, "f64.copysign", None),
    (0xA7, "i32.wrap_i64", None),
    (0xA8, "i32.trunc_f32_s", None),
    (0xA9, "i32.trunc_f32_u", None),
    (0xAA, "i32.trunc_f64_s", None),
    (0xAB, "i32.trunc_f64_u", None),
    (0xAC, "i64.extend_i32_s", None),
    (0xAD, "i64.extend_i32_u", None),
    (0xAE, "i64.trunc_f32_s", None),
    (0xAF, "i64.trunc_f32_u", None),
    (0xB0, "i64.trunc_f64_s", None),
    (0xB1, "i64.trunc_f64_u", None),
    (0xB2, "f32.convert_i32_s", None),
    (0xB3, "f32.convert_i32_u", None),
    (0xB4, "f32.convert_i64_s", None),
    (0xB5, "f32.convert_i64_u", None),
    (0xB6, "f32.demote_f64", None),
    (0xB7, "f64.convert_i32_s", None),
    (0xB8, "f64.convert_i32_u", None),
    (0xB9, "f64.convert_i64_s", None),
    (0xBA, "f64.convert_i64_u", None),
    (0xBB, "f64.promote_f32", None),
    (0xBC, "i32.reinterpret_f32", None),
    (0xBD, "i64.reinterpret_f64", None),
    (0xBE, "f32.reinterpret_i32", None),
    (0xBF, "f64.reinterpret_i64", None),
]

BYTE_TO_NAME = {byte: name for byte, name, _ in _OPS}
NAME_TO_BYTE = {name: byte for byte, name, _ in _OPS}
IMMEDIATE_KIND = {name: kind for _, name, kind in _OPS}

# log2 of the access width, used as the default memarg alignment
NATURAL_ALIGN = {
    "i32.load": 2, "i64.load": 3, "f32.load": 2, "f64.load": 3,
    "i32.load8_s": 0, "i32.load8_u": 0, "i32.load16_s": 1, "i32.load16_u": 1,
    "i64.load8_s": 0, "i64.load8_u": 0, "i64.load16_s": 1, "i64.load16_u": 1,
    "i64.load32_s": 2, "i64.load32_u": 2,
    "i32.store": 2, "i64.store": 3, "f32.store": 2, "f64.store": 3,
    "i32.store8": 0, "i32.store16": 1, "i64.store8": 0, "i64.store16": 1,
    "i64.store32": 2,
}

CONST_OPS = {"i32.const": "i32", "i64.const": "i64",
             "f32.const": "f32", "f64.const": "f64"}
