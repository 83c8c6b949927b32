import pytest

from wasmedit.errors import FormatError, TruncatedError
from wasmedit.model import (
    ConstExpr,
    ElemElement,
    FunctionElement,
    ImportElement,
    Instruction,
    Local,
    TableElement,
    TypeElement,
)
from wasmedit.parser import parse_module

from conftest import (
    VT,
    lean_bytes,
    functype,
    header,
    i32_const_expr,
    section,
    uleb,
    vec,
    wname,
)


def test_fixture_parses_to_known_objects(lean):
    module, diag = parse_module(lean)
    assert module.type_sec == [
        TypeElement(0, ["i32"], ["i32"]),
        TypeElement(1, ["i32"], []),
    ]
    assert module.import_sec == [
        ImportElement(0, "env", "sqrt", 0),
        ImportElement(1, "env", "print", 0),
    ]
    # function indices are absolute: two imports occupy 0 and 1
    assert module.func_sec == [FunctionElement(2, 0)]
    assert module.table_sec == [TableElement(5, 5)]
    assert module.elem_sec == [ElemElement(0, ConstExpr.const("i32", 1), [1])]
    code = module.code_sec[0]
    assert code.func_idx == 2
    assert code.locals == [Local(1, "i32")]
    assert code.body == [
        Instruction("loop"),
        Instruction("end"),
        Instruction("local.get", 0),
        Instruction("call", 0),
        Instruction("end"),
    ]
    assert diag.warnings == []
    assert diag.non_minimal_leb_count == 0


def test_fixture_constructor_notation(lean):
    module, _ = parse_module(lean)
    assert repr(module.type_sec[0]) == 'Type(0, ["i32"], ["i32"])'
    assert repr(module.import_sec[0]) == 'Import(0, "env", "sqrt", 0)'
    assert repr(module.func_sec[0]) == "Function(2, 0)"
    assert repr(module.table_sec[0]) == "Table(5, 5)"
    assert repr(module.elem_sec[0]) == "Elem(0, 1, [1])"
    assert repr(module.code_sec[0]).startswith('Code(2, [Local(1, "i32")], ')


def test_empty_module():
    module, diag = parse_module(header())
    assert module.type_sec == [] and module.code_sec == []
    assert module.start_sec is None
    assert diag.warnings == []


def test_bad_magic():
    with pytest.raises(FormatError):
        parse_module(b"\x00wasm\x01\x00\x00\x00")
    with pytest.raises(TruncatedError):
        parse_module(b"\x00asm")


def test_bad_version():
    with pytest.raises(FormatError, match="version"):
        parse_module(b"\x00asm\x02\x00\x00\x00")


def test_truncated_section():
    data = header() + bytes([1]) + uleb(100) + b"\x01"
    with pytest.raises(TruncatedError):
        parse_module(data)


def test_section_size_mismatch():
    # type section declares 3 payload bytes but a valid functype needs 4+
    payload = vec([functype([], [])])
    data = header() + bytes([1]) + uleb(len(payload) + 1) + payload + b"\x00"
    with pytest.raises(FormatError, match="section 1"):
        parse_module(data)


def test_unknown_opcode_rejected():
    body = vec([]) + b"\xfc\x0b"
    data = (header()
            + section(1, vec([functype([], [])]))
            + section(3, vec([uleb(0)]))
            + section(10, vec([uleb(len(body)) + body])))
    with pytest.raises(FormatError, match="opcode"):
        parse_module(data)


def test_non_minimal_lebs_counted_and_tolerated():
    # same fixture but the type-section count padded to two bytes
    padded_count = b"\x82\x80\x80\x80\x00"  # 2 in five bytes
    type_sec = padded_count + functype(["i32"], ["i32"]) + functype(["i32"], [])
    data = header() + section(1, type_sec)
    module, diag = parse_module(data)
    assert [t.params for t in module.type_sec] == [["i32"], ["i32"]]
    assert diag.non_minimal_leb_count == 1
    assert diag.warnings == []


def test_duplicate_section_merged_with_warning():
    data = (header()
            + section(1, vec([functype([], [])]))
            + section(1, vec([functype(["i32"], [])])))
    module, diag = parse_module(data)
    assert len(module.type_sec) == 2
    assert module.type_sec[1].idx == 1
    assert any("duplicate" in msg for _, msg in diag.warnings)


def test_out_of_order_section_warned():
    data = (header()
            + section(3, vec([uleb(0)]))
            + section(1, vec([functype([], [])])))
    module, diag = parse_module(data)
    assert len(module.func_sec) == 1
    assert any("out of order" in msg for _, msg in diag.warnings)


def test_custom_and_unknown_sections_preserved():
    custom = wname("producers") + b"\x01\x02\x03"
    data = (header()
            + section(0, custom)
            + section(1, vec([functype([], [])]))
            + section(12, b"\xaa\xbb"))
    module, _ = parse_module(data)
    assert module.custom_secs[0].name == "producers"
    assert module.custom_secs[0].payload == b"\x01\x02\x03"
    assert module.custom_secs[0].after_section == 0
    assert module.unknown_secs[0].section_id == 12
    assert module.unknown_secs[0].payload == b"\xaa\xbb"
    assert module.unknown_secs[0].after_section == 1


def test_name_section_decoded():
    names = (bytes([1])  # function names
             + uleb(len(vec([uleb(0) + wname("sqrt"), uleb(2) + wname("fac")])))
             + vec([uleb(0) + wname("sqrt"), uleb(2) + wname("fac")]))
    data = lean_bytes() + section(0, wname("name") + names)
    module, diag = parse_module(data)
    custom = module.name_section()
    assert custom is not None
    fn_names = custom.names.get_map(1)
    assert [(e.idx, e.name) for e in fn_names] == [(0, "sqrt"), (2, "fac")]
    assert custom.after_section == 10
    assert diag.warnings == []


def test_malformed_name_section_kept_raw():
    payload = wname("name") + b"\x01\xff\xff"  # subsection size overruns
    data = header() + section(0, payload)
    module, diag = parse_module(data)
    assert module.custom_secs[0].payload == b"\x01\xff\xff"
    assert any("name section" in msg for _, msg in diag.warnings)


def test_import_kinds_round_trip_model():
    imports = vec([
        wname("env") + wname("mem") + b"\x02\x00" + uleb(1),
        wname("env") + wname("tbl") + b"\x01\x70\x01" + uleb(2) + uleb(4),
        wname("env") + wname("g") + b"\x03" + bytes([VT["i64"]]) + b"\x00",
        wname("env") + wname("f") + b"\x00" + uleb(0),
    ])
    data = header() + section(1, vec([functype([], [])])) + section(2, imports)
    module, _ = parse_module(data)
    kinds = [imp.kind for imp in module.import_sec]
    assert kinds == ["mem", "table", "global", "func"]
    assert module.import_sec[0].desc == (1, None)
    assert module.import_sec[1].desc == ("funcref", 2, 4)
    assert module.import_sec[2].desc == ("i64", 0)
    # only the function import occupies the function index space
    assert module.import_sec[3].func_idx == 0
    assert module.imported_function_count() == 1
    assert module.imported_global_count() == 1


def test_elem_unsupported_form_rejected():
    elem = vec([uleb(1) + i32_const_expr(0) + vec([])])
    data = header() + section(9, elem)
    with pytest.raises(FormatError, match="element segment"):
        parse_module(data)


def test_start_and_globals():
    g = bytes([VT["i32"]]) + b"\x01" + i32_const_expr(7)
    body = vec([]) + b"\x0b"
    data = (header()
            + section(1, vec([functype([], [])]))
            + section(3, vec([uleb(0)]))
            + section(6, vec([g]))
            + section(8, uleb(0))
            + section(10, vec([uleb(len(body)) + body])))
    module, _ = parse_module(data)
    assert module.start_sec.func_idx == 0
    assert module.global_sec[0].val_type == "i32"
    assert module.global_sec[0].mut == 1
    assert module.global_sec[0].init.literal == 7
    assert module.global_sec[0].idx == 0
