"""Worked rewriting recipes built on the semantics APIs.

Three end-to-end transformations, each a plain composition of public
rewriting calls plus model reads:

* instrumentCall       wrap every call of one function with imported hooks
* hardenStackCanary    guard one function's frame with an in-memory canary
* mutateInsertFunction grow the module by one function nothing references

Randomness never comes from ambient state; mutateInsertFunction takes an
explicit seed, so every recipe is a deterministic function of its
arguments and can be reproduced byte for byte.
"""

import random

from .errors import PreconditionError
from .model import Instruction, Module, total_function_count
from .semantics import (
    appendImportFunction,
    getFuncFunctype,
    insertHookFunction,
    insertInternalFunction,
    modifyFuncInstr,
)

__all__ = ["instrumentCall", "hardenStackCanary", "mutateInsertFunction"]


def _text(name) -> str:
    return name.decode("utf-8") if isinstance(name, (bytes, bytearray)) else name


def instrumentCall(module: Module, calleeFuncIdx: int,
                   hooksModuleName="hooks") -> bool:
    """Instrument every ``call calleeFuncIdx`` site with a hook pair.

    Imports ``call_pre`` (an extra leading i32 carries the callee index)
    and ``call_post`` (the callee's own signature) from hooksModuleName,
    then replaces each call with

        i32.const <callee>; call call_pre; call <callee>; call call_post

    The two imports land at the end of the import region, so the callee
    and every other defined function shift up; the replacement sequence
    is written against the shifted index space.
    """
    hooks = _text(hooksModuleName)
    params, results = getFuncFunctype(module, calleeFuncIdx)

    pivot = module.imported_function_count()
    appendImportFunction(module, hooks, "call_pre", ["i32"] + params, results)
    call_pre = pivot
    if calleeFuncIdx >= pivot:
        calleeFuncIdx += 1

    pivot = module.imported_function_count()
    appendImportFunction(module, hooks, "call_post", list(params), results)
    call_post = pivot
    if calleeFuncIdx >= pivot:
        calleeFuncIdx += 1

    import_count = module.imported_function_count()
    for pos, code in enumerate(module.code_sec):
        sites = [offset for offset, ins in enumerate(code.body)
                 if ins.op == "call" and ins.args[0] == calleeFuncIdx]
        # back to front keeps the remaining offsets valid, and the freshly
        # written `call <callee>` inside a replacement is never rescanned
        for offset in reversed(sites):
            modifyFuncInstr(module, import_count + pos, offset, [
                Instruction("i32.const", calleeFuncIdx),
                Instruction("call", call_pre),
                Instruction("call", calleeFuncIdx),
                Instruction("call", call_post),
            ])
    return True


def _stack_pointer(module: Module, idx: int):
    """The (val_type, mut) of global ``idx``, imports counted first."""
    if idx >= 0:
        seen = 0
        for imp in module.import_sec:
            if imp.kind == "global":
                if seen == idx:
                    return imp.desc[0], imp.desc[1]
                seen += 1
        pos = idx - seen
        if pos < len(module.global_sec):
            g = module.global_sec[pos]
            return g.val_type, g.mut
    return None


def hardenStackCanary(module: Module, calleeFuncIdx: int, canary: int,
                      frameSize: int = 16,
                      stackPointerGlobalIdx: int = 0) -> bool:
    """Wrap one function in a canary-checking hook.

    The hook pushes a frame of frameSize bytes on the shadow stack (the
    mutable i32 global named by stackPointerGlobalIdx), stores the
    canary at the frame base, forwards its parameters to the original
    function, and afterwards re-reads the canary: a mismatch means the
    callee wrote past its frame, and the hook traps via ``unreachable``.
    All existing references to the callee are redirected to the hook.
    """
    sp = stackPointerGlobalIdx
    resolved = _stack_pointer(module, sp)
    if resolved is None:
        raise PreconditionError(f"no global {sp} to use as a stack pointer")
    val_type, mut = resolved
    if val_type != "i32" or not mut:
        raise PreconditionError(
            f"global {sp} is {'mutable' if mut else 'immutable'} {val_type}; "
            "the stack pointer must be a mutable i32"
        )
    params, results = getFuncFunctype(module, calleeFuncIdx)

    body = [
        Instruction("global.get", sp),
        Instruction("i32.const", frameSize),
        Instruction("i32.sub"),
        Instruction("global.set", sp),
        Instruction("global.get", sp),
        Instruction("i64.const", canary),
        Instruction("i64.store"),
    ]
    body += [Instruction("local.get", i) for i in range(len(params))]
    body += [
        Instruction("call", calleeFuncIdx),
        Instruction("block"),
        Instruction("global.get", sp),
        Instruction("i64.load"),
        Instruction("i64.const", canary),
        Instruction("i64.eq"),
        Instruction("br_if", 0),
        Instruction("unreachable"),
        Instruction("end"),
        Instruction("global.get", sp),
        Instruction("i32.const", frameSize),
        Instruction("i32.add"),
        Instruction("global.set", sp),
        Instruction("return"),
    ]
    insertHookFunction(
        module, total_function_count(module), calleeFuncIdx,
        body, params, results, [],
    )
    return True


_ZERO = {"i32": 0, "i64": 0, "f32": 0.0, "f64": 0.0}


def mutateInsertFunction(module: Module, rngSeed: int) -> tuple[bool, int]:
    """Insert one never-called function at a seed-chosen position.

    Picks an existing signature at random, builds a body of matching
    zero constants, and inserts it at a random spot in the defined
    region.  Nothing references the new function, so observable
    behavior is unchanged; callers get (True, insertedFuncIdx).
    """
    if not module.type_sec:
        raise PreconditionError("cannot pick a signature: the type section is empty")
    rng = random.Random(rngSeed)
    ftype = module.type_sec[rng.randrange(len(module.type_sec))]
    body = [Instruction(f"{rt}.const", _ZERO[rt]) for rt in ftype.results]
    funcidx = rng.randint(module.imported_function_count(),
                          total_function_count(module))
    insertInternalFunction(
        module, funcidx, list(ftype.params), list(ftype.results), [], body,
    )
    return True, funcidx
