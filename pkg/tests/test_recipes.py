"""End-to-end checks for the three packaged rewriting recipes."""

import pytest

from conftest import functype, header, rich_bytes, section, uleb, vec
from test_semantics import assert_references_preserved, memory_image, snapshot_references
from wasmedit.encoder import encode_module
from wasmedit.errors import PreconditionError
from wasmedit.model import Instruction, total_function_count
from wasmedit.parser import parse_module


def parsed(data: bytes):
    return parse_module(data)[0]
from wasmedit.recipes import hardenStackCanary, instrumentCall, mutateInsertFunction


def ops(code):
    return [ins.op for ins in code.body]


def func_import_names(m):
    return [(i.module, i.name) for i in m.import_sec if i.kind == "func"]


class TestInstrumentCall:
    def test_single_call_site_wrapped(self, rich):
        m = parsed(rich)
        assert instrumentCall(m, 1, "hooks") is True

        assert func_import_names(m) == [
            ("env", "log"), ("hooks", "call_pre"), ("hooks", "call_post")]
        pre_t = m.type_sec[m.import_sec[2].type_idx]
        post_t = m.type_sec[m.import_sec[3].type_idx]
        assert (pre_t.params, pre_t.results) == (["i32", "i32"], ["i32"])
        assert (post_t.params, post_t.results) == (["i32"], ["i32"])
        # callee moved from 1 to 3 under the two import appends
        body = m.code_sec[1].body
        assert [(i.op, i.args[0]) for i in body[1:5]] == [
            ("i32.const", 3), ("call", 1), ("call", 3), ("call", 2)]
        # exactly one site: nothing else in the module calls call_pre
        sites = [i for c in m.code_sec for i in c.body
                 if i.op == "call" and i.args[0] == 1]
        assert len(sites) == 1

    def test_type_section_grows_at_most_two(self, rich):
        m = parsed(rich)
        instrumentCall(m, 1)
        # call_post reuses (i32)->(i32); only call_pre's shape is new
        assert len(m.type_sec) == 3

    def test_imported_callee(self, rich):
        m = parsed(rich)
        instrumentCall(m, 0)
        # import callee sits below the append pivot and keeps its index
        body = m.code_sec[0].body
        assert [(i.op, i.args[0]) for i in body[3:7]] == [
            ("i32.const", 0), ("call", 1), ("call", 0), ("call", 2)]

    def test_zero_call_sites_still_adds_imports(self, rich):
        m = parsed(rich)
        assert instrumentCall(m, 3) is True
        assert len(func_import_names(m)) == 3
        assert not any(i.op == "call" and i.args[0] in (1, 2)
                       for c in m.code_sec for i in c.body)
        # start kept pointing at the shifted former function 3
        assert m.start_sec.func_idx == 5

    def test_output_validates(self, rich, external_ok):
        assert external_ok(rich)
        m = parsed(rich)
        instrumentCall(m, 1)
        assert external_ok(encode_module(m))

    def test_bytes_module_name(self, rich):
        m = parsed(rich)
        instrumentCall(m, 1, b"hooks")
        assert m.import_sec[2].module == "hooks"

    def test_invalid_callee_raises(self, rich):
        m = parsed(rich)
        with pytest.raises(IndexError):
            instrumentCall(m, 99)


class TestHardenStackCanary:
    def test_caller_redirected_hook_calls_original(self, rich):
        m = parsed(rich)
        assert hardenStackCanary(m, 1, canary=0xD00D, stackPointerGlobalIdx=1)

        assert total_function_count(m) == 5
        hook = m.code_sec[-1]
        # the sole pre-existing caller now reaches the hook
        calls = [(i.op, i.args[0]) for i in m.code_sec[1].body if i.op == "call"]
        assert ("call", 4) in calls
        assert ("call", 1) in [(i.op, i.args[0]) for i in hook.body if i.op == "call"]
        assert m.elem_sec[0].func_idxs == [4, 2]

    def test_body_carries_frame_and_canary_literals(self, rich):
        m = parsed(rich)
        hardenStackCanary(m, 1, canary=4242, frameSize=16,
                          stackPointerGlobalIdx=1)
        pairs = [(i.op, tuple(i.args)) for i in m.code_sec[-1].body]
        assert ("i32.const", (16,)) in pairs
        assert ("i32.sub", ()) in pairs
        assert ("i64.const", (4242,)) in pairs
        assert ("i64.store", (3, 0)) in pairs
        ops_ = [op for op, _ in pairs]
        assert ops_.index("block") < ops_.index("br_if") < ops_.index("unreachable")

    def test_parameters_forwarded(self, rich):
        m = parsed(rich)
        hardenStackCanary(m, 1, canary=1, stackPointerGlobalIdx=1)
        body = m.code_sec[-1].body
        call_at = next(i for i, ins in enumerate(body)
                       if ins.op == "call" and ins.args[0] == 1)
        assert (body[call_at - 1].op, body[call_at - 1].args[0]) == ("local.get", 0)

    def test_fixed_canary_is_deterministic(self, rich):
        outs = []
        for _ in range(2):
            m = parsed(rich)
            hardenStackCanary(m, 1, canary=777, stackPointerGlobalIdx=1)
            outs.append(encode_module(m))
        assert outs[0] == outs[1]

    def test_output_validates(self, rich, external_ok):
        m = parsed(rich)
        hardenStackCanary(m, 1, canary=0x5AFE, stackPointerGlobalIdx=1)
        assert external_ok(encode_module(m))

    @pytest.mark.parametrize("sp", [0, 2, 99])
    def test_unusable_stack_pointer(self, rich, sp):
        # 0 is an immutable import, 2 is a defined immutable i64, 99 absent
        m = parsed(rich)
        copy = parsed(rich)
        with pytest.raises(PreconditionError):
            hardenStackCanary(m, 1, canary=5, stackPointerGlobalIdx=sp)
        assert m == copy


def only_void_type_bytes() -> bytes:
    body = vec([]) + b"\x0b"
    return (header()
            + section(1, vec([functype([], [])]))
            + section(3, vec([uleb(0)]))
            + section(10, vec([uleb(len(body)) + body])))


class TestMutateInsertFunction:
    def test_adds_one_internal_function(self, lean, external_ok):
        m = parsed(lean)
        ok, idx = mutateInsertFunction(m, rngSeed=7)
        assert ok is True
        assert len(m.func_sec) == 2
        assert m.imported_function_count() <= idx <= 3
        assert external_ok(encode_module(m))

    def test_empty_results_empty_body(self):
        m = parsed(only_void_type_bytes())
        ok, idx = mutateInsertFunction(m, rngSeed=3)
        assert ok
        new = m.code_sec[idx - m.imported_function_count()]
        assert ops(new) == ["end"]

    def test_same_seed_identical_output(self, rich):
        outs = []
        for _ in range(2):
            m = parsed(rich)
            mutateInsertFunction(m, rngSeed=99)
            outs.append(encode_module(m))
        assert outs[0] == outs[1]

    def test_seeds_spread_over_positions(self, rich):
        placed = set()
        for seed in range(12):
            m = parsed(rich)
            _, idx = mutateInsertFunction(m, seed)
            placed.add(idx)
        assert len(placed) >= 2

    def test_preserves_references_and_memory(self, rich):
        m = parsed(rich)
        before = snapshot_references(m)
        image = memory_image(m)
        _, idx = mutateInsertFunction(m, rngSeed=11)
        assert_references_preserved(before, m)
        assert memory_image(m) == image

    def test_body_matches_result_types(self, rich):
        for seed in range(6):
            m = parsed(rich)
            _, idx = mutateInsertFunction(m, seed)
            pos = idx - m.imported_function_count()
            results = m.type_sec[m.func_sec[pos].type_idx].results
            consts = [f"{rt}.const" for rt in results]
            assert ops(m.code_sec[pos]) == consts + ["end"]

    def test_empty_type_section(self):
        m = parsed(header())
        with pytest.raises(PreconditionError):
            mutateInsertFunction(m, rngSeed=0)

    def test_external_validity_preserved(self, rich, external_ok):
        for seed in (0, 1, 2):
            m = parsed(rich)
            mutateInsertFunction(m, seed)
            assert external_ok(encode_module(m))


class TestRecipesCompose:
    def test_all_three_stack(self, rich, external_ok):
        m = parsed(rich)
        instrumentCall(m, 1)
        hardenStackCanary(m, 3, canary=21, stackPointerGlobalIdx=1)
        mutateInsertFunction(m, rngSeed=5)
        data = encode_module(m)
        assert external_ok(data)
        assert parsed(data) == m
