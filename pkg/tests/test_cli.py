"""Exit codes, output shapes, and recipe handling for the CLI."""

import json

import pytest

from conftest import functype, header, section, uleb, vec
from wasmedit.cli import main, parse_recipe
from wasmedit.model import Instruction
from wasmedit.parser import parse_module


@pytest.fixture
def on_disk(tmp_path):
    def write(data: bytes, name="in.wasm"):
        path = tmp_path / name
        path.write_bytes(data)
        return str(path)
    return write


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestInspect:
    def test_constructor_notation(self, lean, on_disk, capsys):
        code, out, _ = run(capsys, "inspect", on_disk(lean))
        assert code == 0
        assert 'Type(0, ["i32"], ["i32"])' in out
        assert 'Import(0, "env", "sqrt", 0)' in out
        assert "Function(2, 0)" in out
        assert "Table(5, 5)" in out
        assert "Elem(0, 1, [1])" in out

    def test_empty_module_header_only(self, on_disk, capsys):
        code, out, _ = run(capsys, "inspect", on_disk(header()))
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 1
        assert "8 bytes" in lines[0] and "0 section(s)" in lines[0]

    def test_section_filter_exact_lines(self, lean, on_disk, capsys):
        code, out, _ = run(capsys, "inspect", on_disk(lean), "--section", "type")
        assert code == 0
        assert out.splitlines() == [
            'Type(0, ["i32"], ["i32"])',
            'Type(1, ["i32"], [])',
        ]

    def test_json_dump(self, rich, on_disk, capsys):
        code, out, _ = run(capsys, "inspect", on_disk(rich), "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["sections"]["type"][0]["params"] == ["i32"]
        assert doc["sections"]["start"]["func_idx"] == 3
        assert doc["sections"]["data"][0]["init"] == "616263"

    def test_unparseable_is_2(self, on_disk, capsys):
        code, _, err = run(capsys, "inspect", on_disk(b"\x00asm\x01"))
        assert code == 2
        assert "error" in err

    def test_missing_file_is_2(self, tmp_path, capsys):
        code, _, err = run(capsys, "inspect", str(tmp_path / "no.wasm"))
        assert code == 2


class TestValidate:
    def test_valid_fixture(self, rich, on_disk, capsys):
        code, out, _ = run(capsys, "validate", on_disk(rich))
        assert code == 0
        assert "0 error(s)" in out

    def test_func_code_mismatch(self, on_disk, capsys):
        data = (header()
                + section(1, vec([functype([], [])]))
                + section(3, vec([uleb(0)])))
        code, out, _ = run(capsys, "validate", on_disk(data))
        assert code == 1
        assert "error" in out

    def test_external_without_tool(self, rich, on_disk, capsys, monkeypatch):
        monkeypatch.delenv("WASMEDIT_VALIDATOR", raising=False)
        monkeypatch.setattr("wasmedit.validate.shutil.which", lambda name: None)
        code, _, err = run(capsys, "validate", on_disk(rich), "--external")
        assert code == 3
        assert "external" in err

    def test_external_accepts(self, rich, on_disk, capsys, external_ok):
        code, out, _ = run(capsys, "validate", on_disk(rich), "--external")
        assert code == 0
        assert "external: accepted" in out

    def test_external_rejects(self, rich, on_disk, capsys, external_ok):
        code, out, _ = run(capsys, "validate", on_disk(rich[:-4]), "--external")
        assert code == 2  # truncation breaks parsing before external runs


class TestRecipeParsing:
    def test_comments_and_blanks(self):
        steps = parse_recipe("# nothing\n\ninsert-global i32\n  # indented\n")
        assert len(steps) == 1
        assert steps[0].name == "insert-global"
        assert steps[0].positional == ["i32"]

    def test_camel_and_kebab_resolve_same(self):
        a = parse_recipe("appendFuncInstrs funcidx=1 instrs=nop")[0]
        b = parse_recipe("append-func-instrs funcidx=1 instrs=nop")[0]
        assert a.fn is b.fn

    def test_unknown_step(self):
        with pytest.raises(ValueError, match="line 2"):
            parse_recipe("insert-global i32\nfrobnicate x=1\n")

    def test_instruction_text(self):
        from wasmedit.cli import _instr_seq
        seq = _instr_seq("i32.const 7; call 5; i64.store; block; end")
        assert seq == [
            Instruction("i32.const", 7), Instruction("call", 5),
            Instruction("i64.store", 3, 0), Instruction("block"),
            Instruction("end"),
        ]

    def test_quoted_values(self):
        step = parse_recipe('modify-func-name funcidx=0 name="two words"')[0]
        assert step.keyword["name"] == "two words"


class TestApply:
    def test_insert_global_recipe(self, rich, on_disk, tmp_path, capsys,
                                  external_ok):
        recipe = tmp_path / "r.txt"
        recipe.write_text("insert-global i64 mut=1 init=0\n")
        out_path = tmp_path / "out.wasm"
        code, out, _ = run(capsys, "apply", on_disk(rich), str(recipe),
                           str(out_path))
        assert code == 0
        produced = out_path.read_bytes()
        before, _ = parse_module(rich)
        after, _ = parse_module(produced)
        assert len(after.global_sec) == len(before.global_sec) + 1
        assert after.global_sec[-1].val_type == "i64"
        assert external_ok(produced)

    def test_instrument_call_recipe(self, rich, on_disk, tmp_path, capsys,
                                    external_ok):
        recipe = tmp_path / "r.txt"
        recipe.write_text("instrument-call callee=1 module=hooks\n")
        out_path = tmp_path / "out.wasm"
        code, *_ = run(capsys, "apply", on_disk(rich), str(recipe),
                       str(out_path))
        assert code == 0
        after, _ = parse_module(out_path.read_bytes())
        names = [(i.module, i.name) for i in after.import_sec if i.kind == "func"]
        assert ("hooks", "call_pre") in names and ("hooks", "call_post") in names
        assert external_ok(out_path.read_bytes())

    def test_empty_recipe_identity(self, rich, on_disk, tmp_path, capsys):
        recipe = tmp_path / "r.txt"
        recipe.write_text("# no steps\n")
        out_path = tmp_path / "out.wasm"
        code, *_ = run(capsys, "apply", on_disk(rich), str(recipe),
                       str(out_path))
        assert code == 0
        assert parse_module(out_path.read_bytes())[0] == parse_module(rich)[0]

    def test_failed_step_writes_nothing(self, rich, on_disk, tmp_path, capsys):
        recipe = tmp_path / "r.txt"
        # global 0 is imported; the delete returns false
        recipe.write_text("insert-global i32\ndelete-global-variable idx=0\n")
        out_path = tmp_path / "out.wasm"
        code, _, err = run(capsys, "apply", on_disk(rich), str(recipe),
                           str(out_path))
        assert code == 1
        assert "step 2" in err
        assert not out_path.exists()
        assert not list(tmp_path.glob("*.tmp"))

    def test_raising_step_reports_api_error(self, rich, on_disk, tmp_path,
                                            capsys):
        recipe = tmp_path / "r.txt"
        recipe.write_text("insert-global-variable idx=99 valType=i32 mut=1 init=0\n")
        out_path = tmp_path / "out.wasm"
        code, _, err = run(capsys, "apply", on_disk(rich), str(recipe),
                           str(out_path))
        assert code == 1
        assert "step 1" in err and "IndexError" in err
        assert not out_path.exists()

    def test_dry_run_prints_deltas_writes_nothing(self, rich, on_disk,
                                                  tmp_path, capsys):
        recipe = tmp_path / "r.txt"
        recipe.write_text("insert-import-function idx=0 module=env "
                          "funcName=tick paramsType= resultsType=\n")
        out_path = tmp_path / "out.wasm"
        code, out, _ = run(capsys, "apply", on_disk(rich), str(recipe),
                           str(out_path), "--dry-run")
        assert code == 0
        assert "RewriteDelta" in out
        assert "dry run: no output written" in out
        assert not out_path.exists()

    def test_seed_reaches_recipe_steps(self, rich, on_disk, tmp_path, capsys):
        recipe = tmp_path / "r.txt"
        recipe.write_text("mutate-insert-function\n")
        outs = []
        for name in ("a.wasm", "b.wasm"):
            out_path = tmp_path / name
            code, *_ = run(capsys, "apply", on_disk(rich), str(recipe),
                           str(out_path), "--seed", "42")
            assert code == 0
            outs.append(out_path.read_bytes())
        assert outs[0] == outs[1]

    def test_multi_step_recipe(self, rich, on_disk, tmp_path, capsys,
                               external_ok):
        recipe = tmp_path / "r.txt"
        recipe.write_text(
            "insert-global i32 mut=1 init=7   # shadow stack pointer\n"
            "harden-stack-canary callee=1 sp=3 canary=99\n"
            "append-func-instrs funcidx=3 instrs=\"nop; nop\"\n"
        )
        out_path = tmp_path / "out.wasm"
        code, *_ = run(capsys, "apply", on_disk(rich), str(recipe),
                       str(out_path))
        assert code == 0
        assert external_ok(out_path.read_bytes())

    def test_missing_recipe_file(self, rich, on_disk, tmp_path, capsys):
        code, _, err = run(capsys, "apply", on_disk(rich),
                           str(tmp_path / "none.txt"), str(tmp_path / "o.wasm"))
        assert code == 2


class TestStats:
    def test_text(self, rich, on_disk, capsys):
        code, out, _ = run(capsys, "stats", on_disk(rich))
        assert code == 0
        assert "functions: 4 (1 imported)" in out
        assert "type" in out and "code" in out

    def test_json(self, rich, on_disk, capsys):
        code, out, _ = run(capsys, "stats", on_disk(rich), "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["element_counts"]["global"] == 2
        assert sum(doc["section_bytes"].values()) + 8 == doc["byte_size"]


def test_module_entry_point(rich, tmp_path):
    import subprocess, sys
    path = tmp_path / "m.wasm"
    path.write_bytes(rich)
    proc = subprocess.run(
        [sys.executable, "-m", "wasmedit.cli", "inspect", str(path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "module" in proc.stdout
