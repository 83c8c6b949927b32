import pytest

from wasmedit.model import (
    CodeElement,
    ConstExpr,
    FunctionElement,
    ImportElement,
    Instruction,
    Module,
    TypeElement,
    WILD,
    resolve_function,
    total_function_count,
)


class TestInstruction:
    def test_mnemonic_and_hex_and_byte_agree(self):
        assert Instruction("loop") == Instruction("0x03") == Instruction(0x03)
        assert Instruction("call", 5).raw_opcode == 0x10

    def test_unknown_op_rejected(self):
        with pytest.raises(ValueError):
            Instruction("i32.bogus")
        with pytest.raises(ValueError):
            Instruction(0xFC)

    def test_args_may_be_one_list(self):
        assert Instruction("call", [5]) == Instruction("call", 5)
        assert Instruction("0x03", []) == Instruction("loop", None)

    def test_block_type_defaults_empty(self):
        assert Instruction("block").args == [None]
        assert Instruction("if", "i32").args == ["i32"]
        with pytest.raises(ValueError):
            Instruction("block", "v128")

    def test_memarg_defaults_to_natural_alignment(self):
        assert Instruction("i64.store").args == [3, 0]
        assert Instruction("i32.load8_u").args == [0, 0]
        assert Instruction("i32.store", 2, 16).args == [2, 16]
        with pytest.raises(ValueError):
            Instruction("i64.store", 5)  # a memarg has two parts

    def test_call_indirect_default_table(self):
        assert Instruction("call_indirect", 3).args == [3, 0]

    def test_memory_size_default_memory(self):
        assert Instruction("memory.size").args == [0]

    def test_float_immediates_stored_as_bits(self):
        one = Instruction("f32.const", 1.0)
        assert one.args == [0x3F800000]
        assert Instruction("f64.const", 1.0).args == [0x3FF0000000000000]
        # ints pass through as raw bit patterns
        assert Instruction("f32.const", 0x3F800000) == one

    def test_unsigned_int_immediates_normalized(self):
        assert Instruction("i32.const", 2**32 - 1) == Instruction("i32.const", -1)
        assert Instruction("i64.const", 2**64 - 1).args == [-1]

    def test_no_immediate_ops_reject_args(self):
        with pytest.raises(ValueError):
            Instruction("nop", 1)

    def test_repr(self):
        assert repr(Instruction("call", 5)) == 'Instruction("call", 5)'
        assert repr(Instruction("end")) == 'Instruction("end")'
        assert repr(Instruction("br_table", [1, 0], 0)) == \
            'Instruction("br_table", [1, 0], 0)'


class TestConstExpr:
    def test_trailing_end_normalized_away(self):
        a = ConstExpr([Instruction("i32.const", 5), Instruction("end")])
        b = ConstExpr([Instruction("i32.const", 5)])
        assert a == b

    def test_literal(self):
        assert ConstExpr.const("i32", 9).literal == 9
        assert ConstExpr.global_get(0).literal is None
        assert ConstExpr.const("i64", -2).literal == -2


class TestTemplates:
    def test_positional_and_keyword_patterns(self):
        t1 = TypeElement.template(WILD, WILD, ["i32"])
        t2 = TypeElement.template(results=["i32"])
        elem = TypeElement(4, ["i64"], ["i32"])
        assert t1.matches(elem) and t2.matches(elem)
        assert not TypeElement.template(params=[]).matches(elem)

    def test_unknown_field_rejected(self):
        with pytest.raises(TypeError):
            TypeElement.template(nosuch=1)

    def test_import_template_defaults_to_function_imports(self):
        t = ImportElement.template(WILD, WILD, WILD, WILD)
        assert t.matches(ImportElement(0, "env", "f", 0))
        assert not t.matches(ImportElement(None, "env", "m", None, "mem", (1, None)))
        t_mem = ImportElement.template(kind="mem")
        assert t_mem.matches(ImportElement(None, "env", "m", None, "mem", (1, None)))


def _module_with_two_functions() -> Module:
    m = Module()
    m.type_sec.append(TypeElement(0, [], []))
    m.import_sec.append(ImportElement(0, "env", "f", 0))
    m.func_sec.append(FunctionElement(1, 0))
    m.code_sec.append(CodeElement(1, [], [Instruction("end")]))
    return m


class TestFunctionResolution:
    def test_counts_and_resolution(self):
        m = _module_with_two_functions()
        assert total_function_count(m) == 2
        imported = resolve_function(m, 0)
        assert imported.kind == "import" and imported.import_elem.name == "f"
        internal = resolve_function(m, 1)
        assert internal.kind == "internal"
        assert internal.code is m.code_sec[0]
        assert internal.position == 0

    def test_out_of_range_names_the_index_space(self):
        m = _module_with_two_functions()
        with pytest.raises(IndexError, match="function index space"):
            resolve_function(m, 2)


class TestModule:
    def test_equality_ignores_edit_counter(self):
        a = _module_with_two_functions()
        b = _module_with_two_functions()
        a.touch()
        assert a == b

    def test_copy_is_deep(self):
        a = _module_with_two_functions()
        b = a.copy()
        b.code_sec[0].body.insert(0, Instruction("nop"))
        assert a.code_sec[0].body == [Instruction("end")]
        assert a != b
