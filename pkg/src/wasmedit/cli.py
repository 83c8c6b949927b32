"""Command-line front end: inspect | validate | apply | stats.

`apply` drives the rewriting APIs from a plain text recipe file, one
step per line:

    # comments run to end of line
    insert-global i64 mut=1 init=0
    appendFuncInstrs funcidx=2 instrs="i32.const 7; drop"
    instrument-call callee=5 module=hooks

Step names are the camelCase API names or their kebab-case spellings.
Values are Python literals where that parses (7, -1, 0x10, "text"),
bare strings otherwise; key names may be shortened to any unambiguous
prefix of the parameter.  Instruction sequences use mnemonic syntax
with semicolon separators; type lists are comma-separated.  Byte
payloads take a hex: prefix (data=hex:00ff) or are encoded as UTF-8.
"""

import argparse
import ast
import inspect as _inspect
import json
import os
import random
import re
import shlex
import sys
import tempfile

from . import recipes as _recipes
from . import semantics as _semantics
from .encoder import encode_module
from .errors import WasmEditError
from .leb128 import decode_uleb128
from .model import Instruction, Module, total_function_count
from .parser import parse_module
from .validate import validateExternal, validateStructure

_SECTION_ATTRS = {
    "type": "type_sec", "import": "import_sec", "function": "func_sec",
    "func": "func_sec", "table": "table_sec", "memory": "mem_sec",
    "mem": "mem_sec", "global": "global_sec", "export": "export_sec",
    "start": "start_sec", "elem": "elem_sec", "code": "code_sec",
    "data": "data_sec", "custom": "custom_secs",
}

_SECTION_ID_NAMES = {
    0: "custom", 1: "type", 2: "import", 3: "function", 4: "table",
    5: "memory", 6: "global", 7: "export", 8: "start", 9: "elem",
    10: "code", 11: "data",
}


# ------------------------------------------------------------ recipe parsing

def _kebab(name: str) -> str:
    return re.sub(r"(?<!^)(?=[A-Z])", "-", name).lower()


def _insert_global(module: Module, valType: str, mut: int = 1,
                   initValue=0, idx: int | None = None) -> bool:
    """`insert-global` appends when no idx is given."""
    if idx is None:
        return _semantics.appendGlobalVariable(module, valType, mut, initValue)
    return _semantics.insertGlobalVariable(module, idx, valType, mut, initValue)


def _step_table():
    table = {}
    names = list(_semantics.API_NAMES) + ["appendInternalFunction"]
    for name in names:
        fn = getattr(_semantics, name)
        table[name] = fn
        table[_kebab(name)] = fn
    for name in ("instrumentCall", "hardenStackCanary", "mutateInsertFunction"):
        fn = getattr(_recipes, name)
        table[name] = fn
        table[_kebab(name)] = fn
    table["insert-global"] = _insert_global
    return table


_STEPS = _step_table()

# key spellings that are not prefixes of the parameter they stand for
_KEY_ALIASES = {
    "body": ("funcBody", "instrs"),
    "seed": ("rngSeed",),
    "sp": ("stackPointerGlobalIdx",),
    "module": ("moduleName", "hooksModuleName"),
    "name": ("funcName", "name"),
}

_TYPE_LIST_PARAMS = {"paramsType", "resultsType", "locals"}
_INSTR_PARAMS = {"funcBody", "instrs"}


def _literal(text: str):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def _type_list(value) -> list:
    if isinstance(value, list):
        return value
    if value in (None, "", "-", "[]"):
        return []
    return [part.strip() for part in str(value).split(",") if part.strip()]


def _instr_seq(value) -> list[Instruction]:
    if isinstance(value, list):
        return value
    out = []
    for chunk in str(value).split(";"):
        tokens = chunk.split()
        if not tokens:
            continue
        out.append(Instruction(tokens[0], *[_literal(t) for t in tokens[1:]]))
    return out


def _coerce(param: str, value):
    if param in _TYPE_LIST_PARAMS:
        return _type_list(value)
    if param in _INSTR_PARAMS:
        return _instr_seq(value)
    if param == "data" and isinstance(value, str):
        if value.startswith("hex:"):
            return bytes.fromhex(value[4:])
        return value.encode("utf-8")
    return value


def _match_param(key: str, names: list[str]) -> str:
    for alias in _KEY_ALIASES.get(key, ()):
        if alias in names:
            return alias
    lowered = key.lower()
    exact = [n for n in names if n.lower() == lowered]
    if exact:
        return exact[0]
    prefixed = [n for n in names if n.lower().startswith(lowered)]
    if len(prefixed) == 1:
        return prefixed[0]
    if prefixed:
        raise ValueError(f"ambiguous key {key!r}: matches {', '.join(prefixed)}")
    raise ValueError(f"no parameter matches key {key!r} (have {', '.join(names)})")


class RecipeStep:
    def __init__(self, lineno: int, text: str):
        self.lineno = lineno
        self.text = text
        tokens = shlex.split(text, comments=True)
        name = tokens[0]
        fn = _STEPS.get(name)
        if fn is None:
            raise ValueError(f"unknown step {name!r}")
        self.name = name
        self.fn = fn
        self.positional = []
        self.keyword = {}
        for token in tokens[1:]:
            if "=" in token:
                key, _, raw = token.partition("=")
                self.keyword[key] = raw
            else:
                if self.keyword:
                    raise ValueError("positional arguments must precede key=value ones")
                self.positional.append(_literal(token))

    def run(self, module: Module, seed: int):
        params = [p for p in _inspect.signature(self.fn).parameters
                  if p != "module"]
        args = [_coerce(params[i], v) if i < len(params) else v
                for i, v in enumerate(self.positional)]
        kwargs = {}
        for key, raw in self.keyword.items():
            target = _match_param(key, params)
            kwargs[target] = _coerce(target, _literal(raw))
        if "rngSeed" in params and "rngSeed" not in kwargs \
                and len(args) < params.index("rngSeed") + 1:
            kwargs["rngSeed"] = seed
        if "canary" in params and "canary" not in kwargs \
                and len(args) < params.index("canary") + 1:
            kwargs["canary"] = random.Random(seed).randint(1, 10000)
        return self.fn(module, *args, **kwargs)


def parse_recipe(text: str) -> list[RecipeStep]:
    steps = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            steps.append(RecipeStep(lineno, stripped))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return steps


# ------------------------------------------------------------------ plumbing

def _read_module(path: str):
    """(module, data) or an exit code 2 after printing the failure."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None
    try:
        module, _ = parse_module(data)
    except WasmEditError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return None
    return module, data


def _jsonable(obj):
    if isinstance(obj, Instruction):
        return {"op": obj.op, "args": [_jsonable(a) for a in obj.args]}
    if isinstance(obj, (bytes, bytearray)):
        return obj.hex()
    if hasattr(obj, "__dataclass_fields__"):
        return {name: _jsonable(getattr(obj, name))
                for name in obj.__dataclass_fields__
                if not name.startswith("_")}
    if isinstance(obj, list):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    return obj


def _section_spans(data: bytes) -> list[tuple[int, int]]:
    """(section id, byte length incl. header) pairs in file order."""
    spans = []
    pos = 8
    while pos < len(data):
        start = pos
        sec_id = data[pos]
        size, used = decode_uleb128(data, pos + 1)
        pos += 1 + used + size
        spans.append((sec_id, pos - start))
    return spans


# --------------------------------------------------------------- subcommands

def cmd_inspect(args) -> int:
    loaded = _read_module(args.input)
    if loaded is None:
        return 2
    module, data = loaded

    if args.json:
        doc = {"byte_size": len(data), "sections": {}}
        for name in ("type", "import", "function", "table", "memory",
                     "global", "export", "start", "elem", "code", "data",
                     "custom"):
            value = getattr(module, _SECTION_ATTRS[name])
            if name == "start":
                if value is not None:
                    doc["sections"][name] = _jsonable(value)
            elif value:
                doc["sections"][name] = _jsonable(value)
        print(json.dumps(doc, indent=2))
        return 0

    if args.section:
        value = getattr(module, _SECTION_ATTRS[args.section])
        if args.section == "start":
            value = [] if value is None else [value]
        for element in value:
            print(repr(element))
        return 0

    counts = sum(
        1 for name in ("type", "import", "function", "table", "memory",
                       "global", "export", "elem", "code", "data")
        if getattr(module, _SECTION_ATTRS[name])
    ) + (module.start_sec is not None) + bool(module.custom_secs)
    print(f"module {args.input}: {len(data)} bytes, version 1, "
          f"{counts} section(s), {total_function_count(module)} function(s)")
    for name in ("type", "import", "function", "table", "memory", "global",
                 "export", "start", "elem", "code", "data", "custom"):
        value = getattr(module, _SECTION_ATTRS[name])
        if name == "start":
            value = [] if value is None else [value]
        if not value:
            continue
        print(f"[{name}]")
        for element in value:
            print(f"  {element!r}")
    return 0


def cmd_validate(args) -> int:
    loaded = _read_module(args.input)
    if loaded is None:
        return 2
    module, data = loaded
    diags = validateStructure(module)
    for diag in diags:
        print(diag)
    errors = sum(d.severity == "error" for d in diags)
    warnings = len(diags) - errors
    print(f"{args.input}: {errors} error(s), {warnings} warning(s)")

    ok = errors == 0
    if args.external:
        try:
            result = validateExternal(data)
        except EnvironmentError as exc:
            print(f"external validator failed to run: {exc}", file=sys.stderr)
            return 3
        if result.status == "skipped":
            print("no external validator configured or discovered",
                  file=sys.stderr)
            return 3
        print(f"external: {result.status} ({result.command})")
        if result.status == "rejected" and result.tool_output.strip():
            print(result.tool_output.strip())
        ok = ok and result.accepted
    return 0 if ok else 1


def cmd_apply(args) -> int:
    loaded = _read_module(args.input)
    if loaded is None:
        return 2
    module, _ = loaded
    try:
        with open(args.recipe, "r", encoding="utf-8") as fh:
            steps = parse_recipe(fh.read())
    except OSError as exc:
        print(f"error: cannot read {args.recipe}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {args.recipe}: {exc}", file=sys.stderr)
        return 1

    for number, step in enumerate(steps, start=1):
        try:
            result = step.run(module, args.seed)
        except Exception as exc:
            print(f"step {number} ({step.text}) failed: "
                  f"{type(exc).__name__}: {exc}", file=sys.stderr)
            return 1
        if result is False:
            print(f"step {number} ({step.text}) returned false: "
                  "target not found", file=sys.stderr)
            return 1
        if args.dry_run:
            deltas = _semantics.get_last_deltas()
            shown = ", ".join(map(repr, deltas)) if deltas else "no index shifts"
            print(f"step {number}: {step.text}\n  -> {shown}")

    if args.dry_run:
        for diag in validateStructure(module):
            print(diag)
        print("dry run: no output written")
        return 0

    data = encode_module(module)
    out_dir = os.path.dirname(os.path.abspath(args.output))
    fd, tmp_path = tempfile.mkstemp(dir=out_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp_path, args.output)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
    print(f"wrote {args.output} ({len(data)} bytes, {len(steps)} step(s))")
    return 0


def cmd_stats(args) -> int:
    loaded = _read_module(args.input)
    if loaded is None:
        return 2
    module, data = loaded

    sizes: dict[str, int] = {}
    for sec_id, length in _section_spans(data):
        name = _SECTION_ID_NAMES.get(sec_id, f"id{sec_id}")
        sizes[name] = sizes.get(name, 0) + length
    counts = {
        name: len(getattr(module, _SECTION_ATTRS[name]))
        for name in ("type", "import", "function", "table", "memory",
                     "global", "export", "elem", "code", "data", "custom")
    }
    counts["start"] = 1 if module.start_sec is not None else 0
    instructions = sum(len(c.body) for c in module.code_sec)

    if args.json:
        print(json.dumps({
            "byte_size": len(data),
            "functions": total_function_count(module),
            "instructions": instructions,
            "element_counts": counts,
            "section_bytes": sizes,
        }, indent=2))
        return 0

    print(f"{args.input}: {len(data)} bytes")
    print(f"functions: {total_function_count(module)} "
          f"({module.imported_function_count()} imported), "
          f"{instructions} instruction(s)")
    for name in ("type", "import", "function", "table", "memory", "global",
                 "export", "start", "elem", "code", "data", "custom"):
        if counts.get(name) or sizes.get(name):
            print(f"  {name:<9} {counts.get(name, 0):>5} element(s) "
                  f"{sizes.get(name, 0):>7} byte(s)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wasmedit",
        description="Inspect, validate, and rewrite WebAssembly binaries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="dump the parsed object model")
    p.add_argument("input")
    p.add_argument("--section", choices=sorted(_SECTION_ATTRS))
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_inspect)

    p = sub.add_parser("validate", help="check structural validity")
    p.add_argument("input")
    p.add_argument("--external", action="store_true",
                   help="also run the external validator "
                        "(WASMEDIT_VALIDATOR or auto-discovered)")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("apply", help="run a recipe file and write the result")
    p.add_argument("input")
    p.add_argument("recipe")
    p.add_argument("output")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for steps with randomized arguments")
    p.add_argument("--dry-run", action="store_true",
                   help="print per-step index deltas and diagnostics, "
                        "write nothing")
    p.set_defaults(fn=cmd_apply)

    p = sub.add_parser("stats", help="per-section size and count summary")
    p.add_argument("input")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_stats)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
