"""Semantics-level rewriting APIs.

Each public call performs one coherent edit (spanning however many
sections that takes), restores index continuity via the section fixer,
and repairs every cross-section reference with fixReferences.  Names
are camelCase because they form the toolkit's published surface.

Conventions shared by the family:

* Function and global indices are absolute (imports first).
* insert*(idx) places the new entity AT idx; append* inserts at the end.
  Out-of-range insertion points raise IndexError.
* modify*/delete* return False when the target does not exist, leaving
  the module untouched (failure totality).  Deleting an entity that is
  still referenced raises BrokenReferenceError instead of corrupting.
* Instruction sequences passed in are interpreted in the PRE-edit index
  space; the automatic reference fix adjusts them along with the rest
  of the module.
* get_last_deltas() reports the index-space shifts of the most recent
  call, mainly for dry-run displays.
"""

import bisect

from .errors import (
    BrokenReferenceError,
    LimitError,
    StructureError,
    TypeMismatchError,
    UnresolvableOffsetError,
)
from .model import (
    CodeElement,
    ConstExpr,
    CustomElement,
    DataElement,
    DATA_NAMES,
    ElemElement,
    ExportElement,
    FUNCTION_NAMES,
    FunctionElement,
    GLOBAL_NAMES,
    GlobalElement,
    ImportElement,
    IndexSpace,
    Instruction,
    Local,
    MemoryElement,
    Module,
    NameEntry,
    NamesData,
    RewriteDelta,
    SectionKind,
    TypeElement,
    total_function_count,
)
from .errors import DuplicateExportError
from .section_rewriter import fix_section_indices

_PAGE = 65536
_MAX_PAGES = 65536

_LAST_DELTAS: list[RewriteDelta] = []


def get_last_deltas() -> list[RewriteDelta]:
    """Index-space shifts produced by the most recent semantics call."""
    return list(_LAST_DELTAS)


def _record(deltas: list[RewriteDelta]) -> None:
    _LAST_DELTAS.clear()
    _LAST_DELTAS.extend(deltas)


# ---------------------------------------------------------------- references

_INSTR_REF_SITES = {
    "call": (IndexSpace.FUNC, 0),
    "global.get": (IndexSpace.GLOBAL, 0),
    "global.set": (IndexSpace.GLOBAL, 0),
    "local.get": (IndexSpace.LOCAL, 0),
    "local.set": (IndexSpace.LOCAL, 0),
    "local.tee": (IndexSpace.LOCAL, 0),
    "memory.size": (IndexSpace.MEM, 0),
    "memory.grow": (IndexSpace.MEM, 0),
}

_EXPORT_SPACE = {
    "func": IndexSpace.FUNC,
    "global": IndexSpace.GLOBAL,
    "table": IndexSpace.TABLE,
    "mem": IndexSpace.MEM,
}

_NAME_MAP_SPACE = {
    IndexSpace.FUNC: FUNCTION_NAMES,
    IndexSpace.GLOBAL: GLOBAL_NAMES,
    IndexSpace.DATA: DATA_NAMES,
}


def _visit_references(module: Module, space: IndexSpace, fn, *,
                      scope_func_idx: int | None = None,
                      skip_code_pos: int | None = None,
                      include_names: bool = True) -> int:
    """Apply ``fn(value, where) -> new value`` to every stored reference in
    ``space``; returns how many changed.  LOCAL space visits only the body
    of ``scope_func_idx``."""
    changed = 0

    def patch_instrs(instrs, where):
        nonlocal changed
        for ins in instrs:
            site = _INSTR_REF_SITES.get(ins.op)
            if site is not None and site[0] is space:
                new = fn(ins.args[site[1]], where)
                if new != ins.args[site[1]]:
                    ins.args[site[1]] = new
                    changed += 1
            elif ins.op == "call_indirect":
                if space is IndexSpace.TYPE:
                    new = fn(ins.args[0], where)
                    if new != ins.args[0]:
                        ins.args[0] = new
                        changed += 1
                elif space is IndexSpace.TABLE:
                    new = fn(ins.args[1], where)
                    if new != ins.args[1]:
                        ins.args[1] = new
                        changed += 1

    if space is IndexSpace.LOCAL:
        if scope_func_idx is None:
            return 0
        pos = scope_func_idx - module.imported_function_count()
        if 0 <= pos < len(module.code_sec):
            patch_instrs(module.code_sec[pos].body, f"code section element {pos}")
        return changed

    for pos, code in enumerate(module.code_sec):
        if pos == skip_code_pos:
            continue
        patch_instrs(code.body, f"code section element {pos}")

    if space in (IndexSpace.GLOBAL, IndexSpace.TYPE, IndexSpace.TABLE,
                 IndexSpace.MEM):
        for pos, g in enumerate(module.global_sec):
            patch_instrs(g.init.instrs, f"global section element {pos}")
        for pos, seg in enumerate(module.data_sec):
            patch_instrs(seg.offset.instrs, f"data section element {pos}")
        for pos, seg in enumerate(module.elem_sec):
            patch_instrs(seg.offset.instrs, f"elem section element {pos}")

    if space is IndexSpace.TYPE:
        for pos, fn_elem in enumerate(module.func_sec):
            new = fn(fn_elem.type_idx, f"function section element {pos}")
            if new != fn_elem.type_idx:
                fn_elem.type_idx = new
                changed += 1
        for pos, imp in enumerate(module.import_sec):
            if imp.kind == "func":
                new = fn(imp.type_idx, f"import section element {pos}")
                if new != imp.type_idx:
                    imp.type_idx = new
                    changed += 1

    if space is IndexSpace.FUNC:
        for pos, seg in enumerate(module.elem_sec):
            for i, func_idx in enumerate(seg.func_idxs):
                new = fn(func_idx, f"elem section element {pos}")
                if new != func_idx:
                    seg.func_idxs[i] = new
                    changed += 1
        if module.start_sec is not None:
            new = fn(module.start_sec.func_idx, "start section")
            if new != module.start_sec.func_idx:
                module.start_sec.func_idx = new
                changed += 1

    if space is IndexSpace.MEM:
        for pos, seg in enumerate(module.data_sec):
            new = fn(seg.mem_idx, f"data section element {pos}")
            if new != seg.mem_idx:
                seg.mem_idx = new
                changed += 1

    kind = {v: k for k, v in _EXPORT_SPACE.items()}.get(space)
    if kind is not None:
        for pos, ex in enumerate(module.export_sec):
            if ex.kind == kind:
                new = fn(ex.target_idx, f"export section element {pos}")
                if new != ex.target_idx:
                    ex.target_idx = new
                    changed += 1

    sub_id = _NAME_MAP_SPACE.get(space) if include_names else None
    if sub_id is not None:
        name_sec = module.name_section()
        if name_sec is not None:
            entries = name_sec.names.get_map(sub_id)
            if entries:
                for entry in entries:
                    new = fn(entry.idx, "name section")
                    if new != entry.idx:
                        entry.idx = new
                        changed += 1
    return changed


def fixReferences(module: Module, delta: RewriteDelta) -> int:
    """Shift every stored index >= delta.pivot in delta.space by
    delta.offset; returns the number of patched references."""
    if delta.offset == 0:
        return 0

    def shift(value, where):
        if value >= delta.pivot:
            new = value + delta.offset
            if new < 0:
                raise BrokenReferenceError(
                    f"{where}: reference {value} in the {delta.space.value} "
                    f"index space would become negative"
                )
            return new
        return value

    return _visit_references(
        module, delta.space, shift, scope_func_idx=delta.func_idx
    )


def _count_references(module: Module, space: IndexSpace, target: int) -> int:
    found = 0

    def probe(value, where):
        nonlocal found
        if value == target:
            found += 1
        return value

    _visit_references(module, space, probe)
    return found


def _apply(module: Module, deltas: list[RewriteDelta]) -> None:
    for delta in deltas:
        fixReferences(module, delta)
    _record(deltas)


# ------------------------------------------------------------------- helpers

def _ensure_type(module: Module, params: list[str], results: list[str]) -> int:
    params, results = list(params), list(results)
    for t in module.type_sec:
        if t.params == params and t.results == results:
            return t.idx
    module.type_sec.append(TypeElement(len(module.type_sec), params, results))
    return len(module.type_sec) - 1


def _normalize_locals(local_vec) -> list[Local]:
    out = []
    for item in local_vec or []:
        if isinstance(item, Local):
            if item.count >= 1:
                out.append(Local(item.count, item.val_type))
        elif isinstance(item, str):
            out.append(Local(1, item))
        else:
            raise TypeError("locals must be Local runs or value-type names")
    return out


def _normalize_body(func_body) -> list[Instruction]:
    body = list(func_body or [])
    if not body or body[-1].op != "end":
        body.append(Instruction("end"))
    return body


def _name_entries(module: Module, sub_id: int, create: bool):
    custom = module.name_section()
    if custom is None:
        if not create:
            return None
        custom = CustomElement("name", NamesData(), after_section=11)
        module.custom_secs.append(custom)
    return custom.names.ensure_map(sub_id) if create else custom.names.get_map(sub_id)


def _find_entry(entries, idx: int):
    if not entries:
        return None
    at = bisect.bisect_left([e.idx for e in entries], idx)
    if at < len(entries) and entries[at].idx == idx:
        return entries[at]
    return None


def _resolved_internal(module: Module, funcidx: int) -> CodeElement | None:
    import_count = module.imported_function_count()
    pos = funcidx - import_count
    if funcidx < import_count or pos >= len(module.code_sec) or funcidx < 0:
        return None
    return module.code_sec[pos]


def _func_signature(module: Module, funcidx: int) -> tuple[list[str], list[str]]:
    import_count = module.imported_function_count()
    if funcidx < import_count:
        seen = 0
        for imp in module.import_sec:
            if imp.kind == "func":
                if seen == funcidx:
                    t = module.type_sec[imp.type_idx]
                    return t.params, t.results
                seen += 1
    t = module.type_sec[module.func_sec[funcidx - import_count].type_idx]
    return t.params, t.results


def getFuncFunctype(module: Module, funcidx: int) -> tuple[list[str], list[str]]:
    """(params, results) of any function in the index space, imported or
    defined.  Returns copies; the module's type entries stay untouched."""
    total = total_function_count(module)
    if funcidx < 0 or funcidx >= total:
        raise IndexError(
            f"function index space has {total} entries; no index {funcidx}"
        )
    params, results = _func_signature(module, funcidx)
    return list(params), list(results)


# ----------------------------------------------------------- global variables

def insertGlobalVariable(module: Module, idx: int, valType: str, mut: int,
                         initValue) -> bool:
    """Insert a defined global AT absolute index ``idx``."""
    base = module.imported_global_count()
    if idx < base or idx > module.global_count():
        raise IndexError(
            f"global insertion point {idx} outside [{base}, {module.global_count()}]"
        )
    module.global_sec.insert(
        idx - base, GlobalElement(None, valType, int(mut), ConstExpr.const(valType, initValue))
    )
    module.touch()
    _apply(module, fix_section_indices(module, SectionKind.GLOBAL))
    return True


def appendGlobalVariable(module: Module, valType: str, mut: int, initValue) -> bool:
    return insertGlobalVariable(module, module.global_count(), valType, mut, initValue)


def modifyGlobalVariable(module: Module, idx: int, valType: str | None = None,
                         mut: int | None = None, initValue=None) -> bool:
    base = module.imported_global_count()
    pos = idx - base
    if idx < base or pos >= len(module.global_sec):
        return False
    g = module.global_sec[pos]
    new_type = valType if valType is not None else g.val_type
    if initValue is not None:
        g.init = ConstExpr.const(new_type, initValue)
    elif valType is not None and valType != g.val_type:
        literal = g.init.literal
        g.init = ConstExpr.const(new_type, literal if literal is not None else 0)
    g.val_type = new_type
    if mut is not None:
        g.mut = int(mut)
    module.touch()
    _apply(module, fix_section_indices(module, SectionKind.GLOBAL))
    return True


def deleteGlobalVariable(module: Module, idx: int) -> bool:
    base = module.imported_global_count()
    pos = idx - base
    if idx < base or pos >= len(module.global_sec):
        return False
    uses = _count_references(module, IndexSpace.GLOBAL, idx)
    entries = _name_entries(module, GLOBAL_NAMES, create=False)
    named = _find_entry(entries, idx)
    if uses - (1 if named else 0) > 0:
        raise BrokenReferenceError(
            f"global {idx} still has {uses - (1 if named else 0)} reference(s)"
        )
    if named:
        entries.remove(named)
    del module.global_sec[pos]
    module.touch()
    _apply(module, fix_section_indices(module, SectionKind.GLOBAL))
    return True


# ------------------------------------------------------------ import & export

def _func_import_positions(module: Module) -> list[int]:
    return [pos for pos, imp in enumerate(module.import_sec) if imp.kind == "func"]


def insertImportFunction(module: Module, idx: int, moduleName: str, funcName: str,
                         paramsType: list[str], resultsType: list[str]) -> bool:
    """Insert a function import AT function index ``idx`` (imports stay in
    front of defined functions, so idx <= import count)."""
    positions = _func_import_positions(module)
    if idx < 0 or idx > len(positions):
        raise IndexError(
            f"import insertion point {idx} outside [0, {len(positions)}]"
        )
    type_idx = _ensure_type(module, paramsType, resultsType)
    element = ImportElement(None, moduleName, funcName, type_idx)
    if idx == len(positions):
        module.import_sec.append(element)
    else:
        module.import_sec.insert(positions[idx], element)
    module.touch()
    _apply(module, fix_section_indices(module, SectionKind.IMPORT))
    return True


def appendImportFunction(module: Module, moduleName: str, funcName: str,
                         paramsType: list[str], resultsType: list[str]) -> bool:
    return insertImportFunction(
        module, module.imported_function_count(), moduleName, funcName,
        paramsType, resultsType,
    )


def modifyImportFunction(module: Module, funcidx: int, moduleName: str | None = None,
                         funcName: str | None = None,
                         paramsType: list[str] | None = None,
                         resultsType: list[str] | None = None) -> bool:
    positions = _func_import_positions(module)
    if funcidx < 0 or funcidx >= len(positions):
        return False
    imp = module.import_sec[positions[funcidx]]
    if moduleName is not None:
        imp.module = moduleName
    if funcName is not None:
        imp.name = funcName
    if paramsType is not None or resultsType is not None:
        old = module.type_sec[imp.type_idx]
        params = paramsType if paramsType is not None else old.params
        results = resultsType if resultsType is not None else old.results
        imp.type_idx = _ensure_type(module, params, results)
    module.touch()
    _apply(module, fix_section_indices(module, SectionKind.IMPORT))
    return True


def deleteImportFunction(module: Module, funcidx: int) -> bool:
    positions = _func_import_positions(module)
    if funcidx < 0 or funcidx >= len(positions):
        return False
    uses = _count_references(module, IndexSpace.FUNC, funcidx)
    entries = _name_entries(module, FUNCTION_NAMES, create=False)
    named = _find_entry(entries, funcidx)
    if uses - (1 if named else 0) > 0:
        raise BrokenReferenceError(
            f"imported function {funcidx} still has "
            f"{uses - (1 if named else 0)} reference(s)"
        )
    if named:
        entries.remove(named)
    del module.import_sec[positions[funcidx]]
    module.touch()
    _apply(module, fix_section_indices(module, SectionKind.IMPORT))
    return True


def insertExportFunction(module: Module, idx: int, funcName: str, funcidx: int) -> bool:
    """Insert a function export at export position ``idx``."""
    if idx < 0 or idx > len(module.export_sec):
        raise IndexError(
            f"export insertion point {idx} outside [0, {len(module.export_sec)}]"
        )
    if funcidx < 0 or funcidx >= total_function_count(module):
        raise IndexError(
            f"function index space has {total_function_count(module)} entries; "
            f"no index {funcidx}"
        )
    if any(ex.name == funcName for ex in module.export_sec):
        raise DuplicateExportError(f"export name {funcName!r} already exists")
    module.export_sec.insert(idx, ExportElement(None, funcName, "func", funcidx))
    module.touch()
    _apply(module, fix_section_indices(module, SectionKind.EXPORT))
    return True


def appendExportFunction(module: Module, funcName: str, funcidx: int) -> bool:
    return insertExportFunction(module, len(module.export_sec), funcName, funcidx)


def modifyExportFunction(module: Module, idx: int, funcName: str | None = None,
                         funcidx: int | None = None) -> bool:
    if idx < 0 or idx >= len(module.export_sec):
        return False
    ex = module.export_sec[idx]
    if ex.kind != "func":
        return False
    if funcidx is not None and not 0 <= funcidx < total_function_count(module):
        raise IndexError(
            f"function index space has {total_function_count(module)} "
            f"entries; no index {funcidx}"
        )
    if funcName is not None and funcName != ex.name:
        if any(other.name == funcName for other in module.export_sec):
            raise DuplicateExportError(f"export name {funcName!r} already exists")
        ex.name = funcName
    if funcidx is not None:
        ex.target_idx = funcidx
    module.touch()
    _apply(module, fix_section_indices(module, SectionKind.EXPORT))
    return True


def deleteExportFunction(module: Module, idx: int) -> bool:
    if idx < 0 or idx >= len(module.export_sec):
        return False
    if module.export_sec[idx].kind != "func":
        return False
    del module.export_sec[idx]
    module.touch()
    _apply(module, fix_section_indices(module, SectionKind.EXPORT))
    return True


# -------------------------------------------------------------- linear memory

def appendLinearMemory(module: Module, pageNum: int) -> bool:
    """Grow memory 0's minimum by ``pageNum`` pages (creating it if absent)."""
    if pageNum < 1:
        raise LimitError("pageNum must be at least 1")
    for imp in module.import_sec:
        if imp.kind == "mem":
            minimum, maximum = imp.desc
            minimum += pageNum
            if minimum > _MAX_PAGES:
                raise LimitError(f"memory of {minimum} pages exceeds {_MAX_PAGES}")
            if maximum is not None and maximum < minimum:
                maximum = minimum
            imp.desc = (minimum, maximum)
            module.touch()
            _apply(module, fix_section_indices(module, SectionKind.MEM))
            return True
    if not module.mem_sec:
        if pageNum > _MAX_PAGES:
            raise LimitError(f"memory of {pageNum} pages exceeds {_MAX_PAGES}")
        module.mem_sec.append(MemoryElement(pageNum, None))
    else:
        mem = module.mem_sec[0]
        if mem.min + pageNum > _MAX_PAGES:
            raise LimitError(
                f"memory of {mem.min + pageNum} pages exceeds {_MAX_PAGES}"
            )
        mem.min += pageNum
        if mem.max is not None and mem.max < mem.min:
            mem.max = mem.min
    module.touch()
    _apply(module, fix_section_indices(module, SectionKind.MEM))
    return True


def modifyLinearMemory(module: Module, offset: int, data: bytes) -> bool:
    """Write ``data`` at absolute memory offset, patching literal-offset
    segments in place and creating segments for uncovered ranges."""
    if offset < 0:
        raise IndexError("memory offset must be non-negative")
    if not data:
        return True
    lo, hi = offset, offset + len(data)
    covered = []
    for seg in module.data_sec:
        if len(seg.offset.instrs) != 1 or seg.offset.instrs[0].op != "i32.const":
            # placement unknowable, so overlap with the write can't be ruled out
            raise UnresolvableOffsetError(
                f"data segment {seg.idx} has an expression offset; its "
                "placement cannot be resolved statically"
            )
        seg_lo = seg.offset.literal
        seg_hi = seg_lo + len(seg.init)
        if seg_lo < hi and lo < seg_hi:
            covered.append((seg_lo, seg_hi, seg))

    for seg_lo, seg_hi, seg in covered:
        cut_lo, cut_hi = max(lo, seg_lo), min(hi, seg_hi)
        init = bytearray(seg.init)
        init[cut_lo - seg_lo : cut_hi - seg_lo] = data[cut_lo - lo : cut_hi - lo]
        seg.init = bytes(init)

    uncovered = []
    cursor = lo
    for seg_lo, seg_hi, _ in sorted(covered):
        if seg_lo > cursor:
            uncovered.append((cursor, min(seg_lo, hi)))
        cursor = max(cursor, seg_hi)
    if cursor < hi:
        uncovered.append((cursor, hi))
    for run_lo, run_hi in uncovered:
        module.data_sec.append(DataElement(
            None, 0, ConstExpr.const("i32", run_lo), data[run_lo - lo : run_hi - lo]
        ))
    module.touch()
    _apply(module, fix_section_indices(module, SectionKind.DATA))
    return True


# ------------------------------------------------------------------ functions

def insertInternalFunction(module: Module, funcidx: int, paramsType: list[str],
                           resultsType: list[str], locals, funcBody) -> bool:
    """Insert a defined function AT absolute index ``funcidx``."""
    import_count = module.imported_function_count()
    total = total_function_count(module)
    if funcidx < import_count or funcidx > total:
        raise IndexError(
            f"function insertion point {funcidx} outside [{import_count}, {total}]"
        )
    type_idx = _ensure_type(module, paramsType, resultsType)
    pos = funcidx - import_count
    module.func_sec.insert(pos, FunctionElement(None, type_idx))
    module.code_sec.insert(pos, CodeElement(
        None, _normalize_locals(locals), _normalize_body(funcBody)
    ))
    module.touch()
    deltas = fix_section_indices(module, SectionKind.FUNC)
    _apply(module, deltas)
    return True


def appendInternalFunction(module: Module, paramsType: list[str],
                           resultsType: list[str], locals, funcBody) -> bool:
    return insertInternalFunction(
        module, total_function_count(module), paramsType, resultsType,
        locals, funcBody,
    )


def insertIndirectFunction(module: Module, funcidx: int, paramsType: list[str],
                           resultsType: list[str], locals, funcBody) -> bool:
    """insertInternalFunction plus registration in elem segment 0."""
    insertInternalFunction(module, funcidx, paramsType, resultsType, locals, funcBody)
    inserted = get_last_deltas()
    if not module.elem_sec:
        module.elem_sec.append(ElemElement(None, ConstExpr.const("i32", 0), [funcidx]))
    else:
        module.elem_sec[0].func_idxs.append(funcidx)
    module.touch()
    elem_deltas = fix_section_indices(module, SectionKind.ELEM)
    for delta in elem_deltas:
        fixReferences(module, delta)
    _record(inserted + elem_deltas)
    return True


def insertHookFunction(module: Module, funcidx: int, hookedFuncIdx: int,
                       funcBody, paramsType: list[str], resultsType: list[str],
                       locals) -> bool:
    """Insert a wrapper function and redirect every reference to the hooked
    function (calls elsewhere, elem entries, export targets, start) to it.
    The hook body's own call of the hooked function is left intact."""
    total = total_function_count(module)
    if hookedFuncIdx < 0 or hookedFuncIdx >= total:
        raise IndexError(
            f"function index space has {total} entries; no index {hookedFuncIdx}"
        )
    params, results = _func_signature(module, hookedFuncIdx)
    if list(paramsType) != list(params) or list(resultsType) != list(results):
        raise TypeMismatchError(
            f"hook signature {paramsType} -> {resultsType} does not match "
            f"hooked function {hookedFuncIdx}'s {params} -> {results}"
        )
    insertInternalFunction(module, funcidx, paramsType, resultsType, locals, funcBody)
    inserted = get_last_deltas()
    hooked_now = hookedFuncIdx + 1 if hookedFuncIdx >= funcidx else hookedFuncIdx
    hook_pos = funcidx - module.imported_function_count()

    def redirect(value, where):
        return funcidx if value == hooked_now else value

    # name-map entries identify functions rather than call them: not redirected
    _visit_references(
        module, IndexSpace.FUNC, redirect,
        skip_code_pos=hook_pos, include_names=False,
    )
    module.touch()
    _record(inserted)
    return True


def deleteFuncInstr(module: Module, funcidx: int, instrOffset: int) -> bool:
    code = _resolved_internal(module, funcidx)
    if code is None:
        return False
    if instrOffset < 0 or instrOffset >= len(code.body):
        raise IndexError(
            f"instruction offset {instrOffset} outside function {funcidx}'s "
            f"body of {len(code.body)}"
        )
    if instrOffset == len(code.body) - 1:
        raise StructureError("the terminal `end` cannot be removed")
    del code.body[instrOffset]
    module.touch()
    _record([])
    return True


def insertFuncInstrs(module: Module, funcidx: int, instrOffset: int, instrs) -> bool:
    code = _resolved_internal(module, funcidx)
    if code is None:
        return False
    if instrOffset < 0 or instrOffset >= len(code.body):
        raise IndexError(
            f"instruction offset {instrOffset} outside function {funcidx}'s "
            f"body of {len(code.body)}"
        )
    code.body[instrOffset:instrOffset] = list(instrs)
    module.touch()
    _record([])
    return True


def appendFuncInstrs(module: Module, funcidx: int, instrs) -> bool:
    code = _resolved_internal(module, funcidx)
    if code is None:
        return False
    code.body[len(code.body) - 1 : len(code.body) - 1] = list(instrs)
    module.touch()
    _record([])
    return True


def modifyFuncInstr(module: Module, funcidx: int, instrOffset: int, instrs) -> bool:
    code = _resolved_internal(module, funcidx)
    if code is None:
        return False
    if instrOffset < 0 or instrOffset >= len(code.body):
        raise IndexError(
            f"instruction offset {instrOffset} outside function {funcidx}'s "
            f"body of {len(code.body)}"
        )
    if instrOffset == len(code.body) - 1:
        raise StructureError("the terminal `end` cannot be replaced")
    code.body[instrOffset : instrOffset + 1] = list(instrs)
    module.touch()
    _record([])
    return True


def appendFuncLocal(module: Module, funcidx: int, valType: str) -> int:
    """Add one local to an internal function; returns its absolute local
    index (parameters included in the numbering)."""
    code = _resolved_internal(module, funcidx)
    if code is None:
        raise IndexError(f"function {funcidx} is not an internal function")
    params, _ = _func_signature(module, funcidx)
    new_index = len(params) + len(code.local_types)
    if code.locals and code.locals[-1].val_type == valType:
        code.locals[-1].count += 1
    else:
        code.locals.append(Local(1, valType))
    module.touch()
    delta = RewriteDelta(IndexSpace.LOCAL, new_index, 1, func_idx=funcidx)
    fixReferences(module, delta)  # appended last: never patches anything
    _record([delta])
    return new_index


# -------------------------------------------------------------- custom names

def _insert_name(module: Module, sub_id: int, idx: int, name: str, bound: int) -> bool:
    if idx < 0 or idx >= bound:
        raise IndexError(f"no entity with index {idx} to name")
    entries = _name_entries(module, sub_id, create=True)
    if _find_entry(entries, idx) is not None:
        return False
    bisect.insort(entries, NameEntry(idx, name), key=lambda e: e.idx)
    module.touch()
    _record([])
    return True


def _modify_name(module: Module, sub_id: int, idx: int, name: str, bound: int) -> bool:
    if idx < 0 or idx >= bound:
        raise IndexError(f"no entity with index {idx} to name")
    entries = _name_entries(module, sub_id, create=True)
    entry = _find_entry(entries, idx)
    if entry is None:
        bisect.insort(entries, NameEntry(idx, name), key=lambda e: e.idx)
    else:
        entry.name = name
    module.touch()
    _record([])
    return True


def _delete_name(module: Module, sub_id: int, idx: int) -> bool:
    entries = _name_entries(module, sub_id, create=False)
    entry = _find_entry(entries, idx)
    if entry is None:
        return False
    entries.remove(entry)
    module.touch()
    _record([])
    return True


def insertFuncName(module: Module, funcidx: int, name: str) -> bool:
    return _insert_name(module, FUNCTION_NAMES, funcidx, name,
                        total_function_count(module))


def modifyFuncName(module: Module, funcidx: int, name: str) -> bool:
    return _modify_name(module, FUNCTION_NAMES, funcidx, name,
                        total_function_count(module))


def deleteFuncName(module: Module, funcidx: int) -> bool:
    return _delete_name(module, FUNCTION_NAMES, funcidx)


def insertGlobalName(module: Module, idx: int, name: str) -> bool:
    return _insert_name(module, GLOBAL_NAMES, idx, name, module.global_count())


def modifyGlobalName(module: Module, idx: int, name: str) -> bool:
    return _modify_name(module, GLOBAL_NAMES, idx, name, module.global_count())


def deleteGlobalName(module: Module, idx: int) -> bool:
    return _delete_name(module, GLOBAL_NAMES, idx)


def insertDataName(module: Module, idx: int, name: str) -> bool:
    return _insert_name(module, DATA_NAMES, idx, name, len(module.data_sec))


def modifyDataName(module: Module, idx: int, name: str) -> bool:
    return _modify_name(module, DATA_NAMES, idx, name, len(module.data_sec))


def deleteDataName(module: Module, idx: int) -> bool:
    return _delete_name(module, DATA_NAMES, idx)


API_NAMES = (
    "appendGlobalVariable", "modifyGlobalVariable", "deleteGlobalVariable",
    "insertGlobalVariable",
    "insertImportFunction", "appendImportFunction", "modifyImportFunction",
    "deleteImportFunction", "insertExportFunction", "appendExportFunction",
    "modifyExportFunction", "deleteExportFunction",
    "appendLinearMemory", "modifyLinearMemory",
    "insertInternalFunction", "insertIndirectFunction", "insertHookFunction",
    "deleteFuncInstr", "appendFuncInstrs", "insertFuncInstrs",
    "modifyFuncInstr", "appendFuncLocal",
    "modifyFuncName", "deleteFuncName", "insertFuncName",
    "modifyGlobalName", "deleteGlobalName", "insertGlobalName",
    "insertDataName", "modifyDataName", "deleteDataName",
)
