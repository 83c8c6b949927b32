import pytest

from wasmedit.errors import (
    FieldError,
    ImmutableFieldError,
    StaleSelectionError,
)
from wasmedit.model import (
    CodeElement,
    ConstExpr,
    DataElement,
    ElemElement,
    FunctionElement,
    ImportElement,
    Instruction,
    IndexSpace,
    MemoryElement,
    Module,
    RewriteDelta,
    SectionKind,
    StartElement,
    TypeElement,
    WILD,
)
from wasmedit.parser import parse_module
from wasmedit.section_rewriter import (
    delete,
    fix_section_indices,
    insert,
    select,
    update,
)


def two_type_module() -> Module:
    m = Module()
    m.type_sec.append(TypeElement(0, ["i32"], ["i32"]))
    m.type_sec.append(TypeElement(1, ["i64"], ["i32"]))
    return m


class TestSelect:
    def test_wildcards_match_everything(self, lean):
        module, _ = parse_module(lean)
        assert len(select(module, TypeElement.template(WILD, WILD, WILD))) == 2
        assert len(select(module, ImportElement.template(WILD, WILD, WILD, WILD))) == 2

    def test_field_patterns_narrow(self, lean):
        module, _ = parse_module(lean)
        sel = select(module, TypeElement.template(WILD, WILD, ["i32"]))
        assert [t.idx for t in sel.elements()] == [0]
        none = select(module, TypeElement.template(params=["f64"]))
        assert len(none) == 0

    def test_last_selected_subselection(self, lean):
        module, _ = parse_module(lean)
        sel = select(module, ImportElement.template(WILD, WILD, WILD, WILD))
        last = sel[-1]
        assert len(last) == 1
        assert last.elements()[0].name == "print"

    def test_start_section_selectable(self):
        m = Module()
        assert len(select(m, StartElement.template(WILD))) == 0
        m.start_sec = StartElement(3)
        sel = select(m, StartElement.template(WILD))
        assert sel.elements() == [StartElement(3)]


class TestInsert:
    def test_inserts_after_last_selected(self):
        m = two_type_module()
        sel = select(m, TypeElement.template(WILD, WILD, WILD))
        assert insert(sel, TypeElement(-1, [], [])) is True
        assert [t.idx for t in m.type_sec] == [0, 1, 2]
        assert m.type_sec[2].params == []

    def test_insert_mid_section_renumbers(self):
        m = two_type_module()
        sel = select(m, TypeElement.template(idx=0))
        insert(sel, TypeElement(-1, ["f32"], []))
        assert [t.idx for t in m.type_sec] == [0, 1, 2]
        assert m.type_sec[1].params == ["f32"]
        assert m.type_sec[2].params == ["i64"]

    def test_empty_selection_returns_false(self):
        m = two_type_module()
        sel = select(m, TypeElement.template(params=["f64"]))
        assert insert(sel, TypeElement(-1, [], [])) is False
        assert len(m.type_sec) == 2

    def test_wrong_element_class_rejected(self):
        m = two_type_module()
        sel = select(m, TypeElement.template(WILD, WILD, WILD))
        with pytest.raises(TypeError):
            insert(sel, FunctionElement(-1, 0))


class TestDelete:
    def test_spec_delta_for_deleting_first_of_two(self):
        m = two_type_module()
        sel = select(m, TypeElement.template(idx=0))
        assert delete(sel) is True
        assert [t.idx for t in m.type_sec] == [0]
        assert m.type_sec[0].params == ["i64"]

    def test_delete_emits_pivot_at_removed_index(self):
        m = two_type_module()
        del m.type_sec[0]
        deltas = fix_section_indices(m, SectionKind.TYPE)
        assert deltas == [RewriteDelta(IndexSpace.TYPE, 0, -1)]

    def test_multi_gap_delete_emits_one_delta_per_gap(self):
        m = Module()
        for i in range(5):
            m.type_sec.append(TypeElement(i, [], []))
        del m.type_sec[3]
        del m.type_sec[1]
        deltas = fix_section_indices(m, SectionKind.TYPE)
        assert deltas == [
            RewriteDelta(IndexSpace.TYPE, 1, -1),
            RewriteDelta(IndexSpace.TYPE, 2, -1),
        ]
        assert [t.idx for t in m.type_sec] == [0, 1, 2]

    def test_empty_selection_returns_false(self):
        m = two_type_module()
        assert delete(select(m, TypeElement.template(params=["f64"]))) is False

    def test_delete_start(self):
        m = Module()
        m.start_sec = StartElement(0)
        assert delete(select(m, StartElement.template(WILD))) is True
        assert m.start_sec is None


class TestUpdate:
    def test_update_field_on_selection(self):
        m = two_type_module()
        sel = select(m, TypeElement.template(idx=1))
        assert update(sel.results, ["i64"]) is True
        assert m.type_sec[1].results == ["i64"]

    def test_update_applies_to_all_selected(self):
        m = two_type_module()
        sel = select(m, TypeElement.template(results=["i32"]))
        assert len(sel) == 2
        update(sel.results, ["f32"])
        assert [t.results for t in m.type_sec] == [["f32"], ["f32"]]

    def test_identity_index_immutable(self):
        m = two_type_module()
        sel = select(m, TypeElement.template(idx=0))
        with pytest.raises(ImmutableFieldError):
            update(sel.idx, 5)

    def test_unknown_field_rejected_at_access(self):
        m = two_type_module()
        sel = select(m, TypeElement.template(idx=0))
        with pytest.raises(FieldError):
            sel.result_types

    def test_empty_selection_returns_false(self):
        m = two_type_module()
        sel = select(m, TypeElement.template(params=["f64"]))
        assert update(sel.results, []) is False

    def test_field_value_read(self, lean):
        module, _ = parse_module(lean)
        sel = select(module, FunctionElement.template(func_idx=2))
        assert sel.type_idx.value == 0
        assert sel.type_idx.values() == [0]


class TestStaleness:
    def test_mutation_invalidates_other_selections(self):
        m = two_type_module()
        first = select(m, TypeElement.template(idx=0))
        second = select(m, TypeElement.template(idx=1))
        delete(first)
        with pytest.raises(StaleSelectionError):
            delete(second)
        with pytest.raises(StaleSelectionError):
            second.elements()

    def test_reselection_after_edit_works(self):
        m = two_type_module()
        delete(select(m, TypeElement.template(idx=0)))
        again = select(m, TypeElement.template(WILD, WILD, WILD))
        assert len(again) == 1


class TestFixer:
    def test_noop_fix_returns_identity(self):
        m = two_type_module()
        assert fix_section_indices(m, SectionKind.TYPE) == []

    def test_idempotent(self):
        m = two_type_module()
        del m.type_sec[0]
        assert fix_section_indices(m, SectionKind.TYPE) != []
        assert fix_section_indices(m, SectionKind.TYPE) == []

    def test_fresh_insert_marked_none_gets_index(self):
        m = two_type_module()
        m.type_sec.insert(1, TypeElement(None, ["f32"], []))
        deltas = fix_section_indices(m, SectionKind.TYPE)
        assert deltas == [RewriteDelta(IndexSpace.TYPE, 1, 1)]
        assert [t.idx for t in m.type_sec] == [0, 1, 2]

    def test_function_space_counts_imports(self, lean):
        module, _ = parse_module(lean)
        module.func_sec.append(FunctionElement(None, 0))
        module.code_sec.append(CodeElement(None, [], [Instruction("end")]))
        deltas = fix_section_indices(module, SectionKind.FUNC)
        # two imports + one existing function: the new one lands at 3
        assert deltas == [RewriteDelta(IndexSpace.FUNC, 3, 1)]
        assert module.func_sec[-1].func_idx == 3
        assert module.code_sec[-1].func_idx == 3

    def test_import_delete_shifts_function_space(self, lean):
        module, _ = parse_module(lean)
        del module.import_sec[0]
        deltas = fix_section_indices(module, SectionKind.IMPORT)
        assert deltas == [RewriteDelta(IndexSpace.FUNC, 0, -1)]
        assert module.import_sec[0].func_idx == 0
        assert module.func_sec[0].func_idx == 1
        assert module.code_sec[0].func_idx == 1

    def test_data_insert_grows_memory(self):
        m = Module()
        m.mem_sec.append(MemoryElement(1, 1))
        m.data_sec.append(DataElement(None, 0, ConstExpr.const("i32", 65536 * 3), b"xy"))
        fix_section_indices(m, SectionKind.DATA)
        assert m.mem_sec[0].min == 4
        assert m.mem_sec[0].max == 4

    def test_data_insert_creates_missing_memory(self):
        m = Module()
        m.data_sec.append(DataElement(None, 0, ConstExpr.const("i32", 10), b"abc"))
        fix_section_indices(m, SectionKind.DATA)
        assert m.mem_sec[0].min == 1

    def test_elem_insert_grows_table(self, lean):
        module, _ = parse_module(lean)
        module.elem_sec.append(ElemElement(None, ConstExpr.const("i32", 4), [2, 2]))
        fix_section_indices(module, SectionKind.ELEM)
        assert module.table_sec[0].min == 6
        assert module.table_sec[0].max == 6

    def test_expression_offsets_left_alone(self):
        m = Module()
        m.mem_sec.append(MemoryElement(1, None))
        m.data_sec.append(DataElement(None, 0, ConstExpr.global_get(0), b"x" * 100000))
        fix_section_indices(m, SectionKind.DATA)
        assert m.mem_sec[0].min == 1
