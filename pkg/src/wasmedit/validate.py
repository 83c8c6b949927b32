"""Structural validity checks plus the external validator hook.

validateStructure() walks a Module and reports Diagnostics; it never
throws.  Error-severity diagnostics mark conditions a conforming engine
rejects at decode/validate time; warnings mark conditions that only
surface later (instantiation-time traps, ignorable custom sections).
Operand-stack typing is deliberately out of scope: that is what the
external hook is for.

validateExternal() shells out to a real validator.  The command comes
from the explicit argument, the WASMEDIT_VALIDATOR environment variable
(a template where {path} is replaced by the binary's location), or
auto-discovery of common tools; with nothing configured the result has
status "skipped".
"""

import os
import shlex
import shutil
import subprocess
import tempfile
from dataclasses import dataclass

from .model import Module, resolve_function, total_function_count
from .opcodes import IMMEDIATE_KIND, NATURAL_ALIGN

_VALID_TYPES = ("i32", "i64", "f32", "f64")
_MAX_PAGES = 65536
_PAGE = 65536


@dataclass(frozen=True, slots=True)
class Diagnostic:
    severity: str          # "error" | "warning"
    section_id: int
    code: str              # stable short identifier
    message: str
    element_idx: int | None = None

    def __str__(self):
        where = f" [{self.element_idx}]" if self.element_idx is not None else ""
        return (f"{self.severity}: section {self.section_id}{where}: "
                f"{self.message} ({self.code})")


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity == "error" for d in diagnostics)


def _check_const_expr(expr, expected_type, module, section_id, idx, diags,
                      context):
    if len(expr.instrs) != 1:
        diags.append(Diagnostic(
            "error", section_id, "const-expr-form",
            f"{context} must be a single constant instruction", idx))
        return
    ins = expr.instrs[0]
    if ins.op == "global.get":
        imported = [i for i in module.import_sec if i.kind == "global"]
        if ins.args[0] >= len(imported):
            diags.append(Diagnostic(
                "error", section_id, "const-expr-global",
                f"{context} reads global {ins.args[0]}, but constant "
                f"expressions may only read the {len(imported)} imported "
                "global(s)", idx))
        else:
            src = imported[ins.args[0]]
            if src.desc[1] != 0:
                diags.append(Diagnostic(
                    "error", section_id, "const-expr-global",
                    f"{context} reads mutable imported global {ins.args[0]}",
                    idx))
            elif expected_type is not None and src.desc[0] != expected_type:
                diags.append(Diagnostic(
                    "error", section_id, "const-expr-type",
                    f"{context} is {src.desc[0]} but {expected_type} is "
                    "required", idx))
        return
    if ins.op not in ("i32.const", "i64.const", "f32.const", "f64.const"):
        diags.append(Diagnostic(
            "error", section_id, "const-expr-form",
            f"{context} uses {ins.op}, which is not constant", idx))
        return
    if expected_type is not None and ins.op != f"{expected_type}.const":
        diags.append(Diagnostic(
            "error", section_id, "const-expr-type",
            f"{context} is {ins.op.split('.')[0]} but {expected_type} is "
            "required", idx))


def _check_body(module, code, params, diags):
    sid = 10
    fidx = code.func_idx
    body = code.body
    n_funcs = total_function_count(module)
    n_globals = module.global_count()
    n_types = len(module.type_sec)
    n_locals = len(params) + len(code.local_types)
    if not body or body[-1].op != "end":
        diags.append(Diagnostic(
            "error", sid, "body-termination",
            f"function {fidx}'s body does not end with `end`", fidx))
        return
    # the final instruction is the body terminator; everything before it
    # must balance on its own
    frames = []
    for pos, ins in enumerate(body[:-1]):
        op = ins.op
        if op in ("block", "loop", "if"):
            frames.append(op)
        elif op == "else":
            if not frames or frames[-1] != "if":
                diags.append(Diagnostic(
                    "error", sid, "body-structure",
                    f"function {fidx}: `else` at offset {pos} without an "
                    "open `if`", fidx))
                return
            frames[-1] = "else"
        elif op == "end":
            if not frames:
                diags.append(Diagnostic(
                    "error", sid, "body-structure",
                    f"function {fidx}: body closes at offset {pos} with "
                    "instructions remaining", fidx))
                return
            frames.pop()
        elif op in ("br", "br_if"):
            if ins.args[0] > len(frames):
                diags.append(Diagnostic(
                    "error", sid, "label-depth",
                    f"function {fidx}: branch to depth {ins.args[0]} with "
                    f"only {len(frames) + 1} label(s) in scope", fidx))
        elif op == "br_table":
            for label in list(ins.args[0]) + [ins.args[1]]:
                if label > len(frames):
                    diags.append(Diagnostic(
                        "error", sid, "label-depth",
                        f"function {fidx}: branch table targets depth "
                        f"{label} with only {len(frames) + 1} label(s) in "
                        "scope", fidx))
                    break
        elif op == "call":
            if ins.args[0] >= n_funcs:
                diags.append(Diagnostic(
                    "error", sid, "func-index-range",
                    f"function {fidx}: call of function {ins.args[0]}, but "
                    f"the function index space has {n_funcs} entries", fidx))
        elif op == "call_indirect":
            if ins.args[0] >= n_types:
                diags.append(Diagnostic(
                    "error", sid, "type-index-range",
                    f"function {fidx}: call_indirect of type {ins.args[0]}, "
                    f"but there are {n_types} types", fidx))
            if ins.args[1] != 0:
                diags.append(Diagnostic(
                    "error", sid, "table-index",
                    f"function {fidx}: call_indirect on table {ins.args[1]} "
                    "(only table 0 exists in core v1)", fidx))
            elif module.table_count() == 0:
                diags.append(Diagnostic(
                    "error", sid, "table-missing",
                    f"function {fidx}: call_indirect without a table", fidx))
        elif op in ("local.get", "local.set", "local.tee"):
            if ins.args[0] >= n_locals:
                diags.append(Diagnostic(
                    "error", sid, "local-index-range",
                    f"function {fidx}: {op} {ins.args[0]} with only "
                    f"{n_locals} local(s) (params included)", fidx))
        elif op in ("global.get", "global.set"):
            if ins.args[0] >= n_globals:
                diags.append(Diagnostic(
                    "error", sid, "global-index-range",
                    f"function {fidx}: {op} {ins.args[0]} with only "
                    f"{n_globals} global(s)", fidx))
        elif IMMEDIATE_KIND.get(op) == "memarg":
            if ins.args[0] > NATURAL_ALIGN[op]:
                diags.append(Diagnostic(
                    "error", sid, "memarg-align",
                    f"function {fidx}: {op} alignment 2^{ins.args[0]} "
                    f"exceeds natural 2^{NATURAL_ALIGN[op]}", fidx))
            if module.memory_count() == 0:
                diags.append(Diagnostic(
                    "error", sid, "memory-missing",
                    f"function {fidx}: {op} without a memory", fidx))
        elif op in ("memory.size", "memory.grow"):
            if ins.args[0] != 0 or module.memory_count() == 0:
                diags.append(Diagnostic(
                    "error", sid, "memory-missing",
                    f"function {fidx}: {op} needs memory 0", fidx))
    if frames:
        diags.append(Diagnostic(
            "error", sid, "body-structure",
            f"function {fidx}: {len(frames)} unclosed block(s)", fidx))


def _check_continuity(module, diags):
    runs = [
        (1, module.type_sec, "idx", 0),
        (3, module.func_sec, "func_idx", module.imported_function_count()),
        (10, module.code_sec, "func_idx", module.imported_function_count()),
        (6, module.global_sec, "idx", module.imported_global_count()),
        (7, module.export_sec, "idx", 0),
        (9, module.elem_sec, "idx", 0),
        (11, module.data_sec, "idx", 0),
    ]
    # identity indices are model bookkeeping; the encoder emits positions,
    # so drift cannot make the binary invalid, only later edits wrong
    for sid, section, attr, base in runs:
        for pos, elem in enumerate(section):
            have = getattr(elem, attr)
            if have != base + pos:
                diags.append(Diagnostic(
                    "warning", sid, "index-continuity",
                    f"element at position {pos} carries index {have}, "
                    f"expected {base + pos} (run the section fixer)", pos))
                break
    seen = 0
    for pos, imp in enumerate(module.import_sec):
        if imp.kind == "func":
            if imp.func_idx != seen:
                diags.append(Diagnostic(
                    "warning", 2, "index-continuity",
                    f"import at position {pos} carries function index "
                    f"{imp.func_idx}, expected {seen}", pos))
                break
            seen += 1


def validateStructure(module: Module) -> list[Diagnostic]:
    """Pure structural checks; returns diagnostics, throws nothing."""
    diags: list[Diagnostic] = []
    n_types = len(module.type_sec)

    _check_continuity(module, diags)

    for t in module.type_sec:
        for vt in list(t.params) + list(t.results):
            if vt not in _VALID_TYPES:
                diags.append(Diagnostic(
                    "error", 1, "bad-value-type",
                    f"type {t.idx} uses unknown value type {vt!r}", t.idx))
        if len(t.results) > 1:
            diags.append(Diagnostic(
                "error", 1, "multi-result",
                f"type {t.idx} returns {len(t.results)} values (core v1 "
                "allows at most one)", t.idx))

    for pos, imp in enumerate(module.import_sec):
        if imp.kind == "func" and imp.type_idx >= n_types:
            diags.append(Diagnostic(
                "error", 2, "type-index-range",
                f"import {imp.module}.{imp.name} has type {imp.type_idx}, "
                f"but there are {n_types} types", pos))

    if len(module.func_sec) != len(module.code_sec):
        diags.append(Diagnostic(
            "error", 10, "func-code-count",
            f"{len(module.func_sec)} function declaration(s) but "
            f"{len(module.code_sec)} bod(y/ies)"))

    for fn in module.func_sec:
        if fn.type_idx >= n_types:
            diags.append(Diagnostic(
                "error", 3, "type-index-range",
                f"function {fn.func_idx} has type {fn.type_idx}, but there "
                f"are {n_types} types", fn.func_idx))

    # engines with reference-types take several tables, so only warn there;
    # several memories still fail engine validation
    if module.table_count() > 1:
        diags.append(Diagnostic(
            "warning", 4, "multi-table",
            f"{module.table_count()} tables (core v1 allows one)"))
    if module.memory_count() > 1:
        diags.append(Diagnostic(
            "error", 5, "multi-memory",
            f"{module.memory_count()} memories (core v1 allows one)"))

    for sid, elems, cap, what in (
        (4, module.table_sec, None, "table"),
        (5, module.mem_sec, _MAX_PAGES, "memory"),
    ):
        for pos, elem in enumerate(elems):
            if elem.max is not None and elem.max < elem.min:
                diags.append(Diagnostic(
                    "error", sid, "limit-order",
                    f"{what} max {elem.max} below min {elem.min}", pos))
            if cap is not None and elem.min > cap:
                diags.append(Diagnostic(
                    "error", sid, "limit-range",
                    f"{what} min {elem.min} exceeds {cap} pages", pos))

    n_globals = module.global_count()
    imported_globals = module.imported_global_count()
    for g in module.global_sec:
        if g.val_type not in _VALID_TYPES:
            diags.append(Diagnostic(
                "error", 6, "bad-value-type",
                f"global {g.idx} has unknown value type {g.val_type!r}",
                g.idx))
            continue
        if g.mut not in (0, 1):
            diags.append(Diagnostic(
                "error", 6, "bad-mutability",
                f"global {g.idx} has mutability {g.mut!r}", g.idx))
        _check_const_expr(g.init, g.val_type, module, 6, g.idx, diags,
                          f"global {g.idx}'s initializer")

    seen_names: dict[str, int] = {}
    n_funcs = total_function_count(module)
    target_caps = {
        "func": n_funcs, "global": n_globals,
        "table": module.table_count(), "mem": module.memory_count(),
    }
    for ex in module.export_sec:
        if ex.name in seen_names:
            diags.append(Diagnostic(
                "error", 7, "export-name-dup",
                f"export name {ex.name!r} appears more than once", ex.idx))
        seen_names[ex.name] = ex.idx
        cap = target_caps.get(ex.kind)
        if cap is None:
            diags.append(Diagnostic(
                "error", 7, "export-kind",
                f"export {ex.name!r} has unknown kind {ex.kind!r}", ex.idx))
        elif ex.target_idx >= cap:
            diags.append(Diagnostic(
                "error", 7, "export-target-range",
                f"export {ex.name!r} targets {ex.kind} {ex.target_idx}, "
                f"but there are {cap}", ex.idx))

    if module.start_sec is not None:
        func_idx = module.start_sec.func_idx
        if func_idx >= n_funcs:
            diags.append(Diagnostic(
                "error", 8, "func-index-range",
                f"start names function {func_idx}, but the function index "
                f"space has {n_funcs} entries"))
        else:
            resolved = resolve_function(module, func_idx)
            if resolved.type_idx < n_types:
                t = module.type_sec[resolved.type_idx]
                if t.params or t.results:
                    diags.append(Diagnostic(
                        "error", 8, "start-signature",
                        f"start function {func_idx} has signature "
                        f"{t.params} -> {t.results}; [] -> [] is required"))

    table_min = None
    if module.table_sec:
        table_min = module.table_sec[0].min
    else:
        for imp in module.import_sec:
            if imp.kind == "table":
                table_min = imp.desc[1]
                break
    for seg in module.elem_sec:
        if module.table_count() == 0:
            diags.append(Diagnostic(
                "error", 9, "table-missing",
                f"elem segment {seg.idx} without a table", seg.idx))
        for func_idx in seg.func_idxs:
            if func_idx >= n_funcs:
                diags.append(Diagnostic(
                    "error", 9, "func-index-range",
                    f"elem segment {seg.idx} lists function {func_idx}, but "
                    f"the function index space has {n_funcs} entries",
                    seg.idx))
        _check_const_expr(seg.offset, "i32", module, 9, seg.idx, diags,
                          f"elem segment {seg.idx}'s offset")
        offset = seg.offset.literal
        if (table_min is not None and isinstance(offset, int)
                and offset + len(seg.func_idxs) > table_min):
            diags.append(Diagnostic(
                "warning", 9, "elem-bounds",
                f"elem segment {seg.idx} spans [{offset}, "
                f"{offset + len(seg.func_idxs)}) beyond table min "
                f"{table_min}: instantiation will trap", seg.idx))

    mem_min = None
    if module.mem_sec:
        mem_min = module.mem_sec[0].min
    else:
        for imp in module.import_sec:
            if imp.kind == "mem":
                mem_min = imp.desc[0]
                break
    for seg in module.data_sec:
        if seg.mem_idx >= module.memory_count():
            diags.append(Diagnostic(
                "error", 11, "memory-index",
                f"data segment {seg.idx} targets memory {seg.mem_idx}, but "
                f"there are {module.memory_count()}", seg.idx))
        _check_const_expr(seg.offset, "i32", module, 11, seg.idx, diags,
                          f"data segment {seg.idx}'s offset")
        offset = seg.offset.literal
        if (mem_min is not None and isinstance(offset, int)
                and offset + len(seg.init) > mem_min * _PAGE):
            diags.append(Diagnostic(
                "warning", 11, "data-bounds",
                f"data segment {seg.idx} spans [{offset}, "
                f"{offset + len(seg.init)}) beyond memory min "
                f"{mem_min} page(s): instantiation will trap", seg.idx))

    if len(module.func_sec) == len(module.code_sec):
        for fn, code in zip(module.func_sec, module.code_sec):
            params = []
            if fn.type_idx < n_types:
                params = module.type_sec[fn.type_idx].params
            for run in code.locals:
                if run.val_type not in _VALID_TYPES:
                    diags.append(Diagnostic(
                        "error", 10, "bad-value-type",
                        f"function {code.func_idx} declares a local of "
                        f"unknown type {run.val_type!r}", code.func_idx))
            _check_body(module, code, params, diags)

    names = module.name_section()
    if names is not None:
        caps = {1: n_funcs, 7: n_globals, 9: len(module.data_sec)}
        for sub_id, cap in caps.items():
            for entry in names.names.get_map(sub_id) or []:
                if entry.idx >= cap:
                    diags.append(Diagnostic(
                        "warning", 0, "name-index-range",
                        f"name map {sub_id} labels index {entry.idx}, "
                        f"beyond the {cap} existing entities"))
    return diags


# ------------------------------------------------------------------- external

@dataclass(frozen=True, slots=True)
class ExternalResult:
    status: str            # "accepted" | "rejected" | "skipped"
    tool_output: str
    command: str | None = None

    @property
    def accepted(self) -> bool:
        return self.status == "accepted"


_NODE_SHIM = ("process.exit(WebAssembly.validate("
              "require('fs').readFileSync(process.argv[1])) ? 0 : 1)")


def discover_validator() -> str | None:
    """Command template for the first available validation tool."""
    if shutil.which("wasm-validate"):
        return "wasm-validate {path}"
    if shutil.which("wasm-tools"):
        return "wasm-tools validate {path}"
    if shutil.which("node"):
        return f"node -e {shlex.quote(_NODE_SHIM)} {{path}}"
    return None


def validateExternal(data: bytes, command: str | None = None) -> ExternalResult:
    """Run an engine-grade validator over encoded bytes.

    ``command`` is a template; ``{path}`` is substituted with a temp-file
    location (appended when absent).  Falls back to $WASMEDIT_VALIDATOR,
    then to auto-discovery.  No tool at all -> status "skipped"; a
    configured tool that cannot be launched -> EnvironmentError.
    """
    configured = command or os.environ.get("WASMEDIT_VALIDATOR")
    template = configured or discover_validator()
    if template is None:
        return ExternalResult("skipped", "no external validator configured")
    if "{path}" not in template:
        template += " {path}"

    fd, path = tempfile.mkstemp(suffix=".wasm")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        argv = [part.replace("{path}", path)
                for part in shlex.split(template)]
        try:
            proc = subprocess.run(argv, capture_output=True, text=True,
                                  timeout=60)
        except FileNotFoundError as exc:
            raise EnvironmentError(
                f"external validator {argv[0]!r} is not executable"
            ) from exc
        output = (proc.stdout + proc.stderr).strip()
        status = "accepted" if proc.returncode == 0 else "rejected"
        return ExternalResult(status, output, " ".join(argv))
    finally:
        os.unlink(path)
