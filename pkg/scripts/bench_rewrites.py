#!/usr/bin/env python3
"""Timing harness for the rewriting toolkit, run against the fixture corpus.

Measures three things per corpus binary:

* decode time (bytes -> object model),
* encode time (object model -> bytes),
* the cost of one valid invocation of every named semantics API.

Each API is exercised through a driver that first performs whatever
preparatory edits the call needs (a delete needs something deletable, a
name edit needs a name map entry, ...) and then hands back the argument
tuple for the named call itself.  Only the named call is timed; the
preparation is not.  The drivers are also imported by the test suite,
which replays them under the external validator, so keep every driver's
end state a valid module.

Budgets checked at the end: every timed API call must come in under
1 second, and decode+encode together under 5 seconds for any binary up
to 1 MiB.  Exit status 1 if either budget is blown.
"""

from __future__ import annotations

import argparse
import itertools
import json
import statistics
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from wasmedit import semantics
from wasmedit.encoder import encode_module
from wasmedit.model import Instruction, Module, TableElement, total_function_count
from wasmedit.parser import parse_module

CORPUS = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "corpus"

API_CALL_BUDGET = 1.0
CODEC_BUDGET = 5.0
CODEC_SIZE_CAP = 1 << 20

_serial = itertools.count()


def _uname(tag: str) -> str:
    # unique within the process so export names never collide
    return f"probe.{tag}.{next(_serial)}"


def _first_defined(m: Module) -> int:
    if not m.func_sec:
        raise ValueError("corpus binary has no defined function")
    return m.imported_function_count()


def _ensure_memory(m: Module) -> None:
    if m.memory_count() == 0:
        semantics.appendLinearMemory(m, 1)


def _ensure_data(m: Module) -> None:
    _ensure_memory(m)
    if not m.data_sec:
        semantics.modifyLinearMemory(m, 16, b"\x01\x02\x03\x04")


def _ensure_table(m: Module) -> None:
    # no semantics API creates tables, so the prep edits the model directly
    if m.table_count() == 0:
        m.table_sec.append(TableElement(4, None))
        m.touch()


def _ensure_global(m: Module) -> None:
    if m.global_count() == 0:
        semantics.appendGlobalVariable(m, "i32", 1, 0)


# --- one driver per public API name -----------------------------------------
# Each returns the positional argument tuple for getattr(semantics, name),
# after making the call valid on any corpus binary.

def _d_appendGlobalVariable(m):
    return ("i32", 1, 7)


def _d_modifyGlobalVariable(m):
    idx = m.global_count()
    semantics.appendGlobalVariable(m, "f64", 1, 0.0)
    return (idx, "i64", 1, 3)


def _d_deleteGlobalVariable(m):
    idx = m.global_count()
    semantics.appendGlobalVariable(m, "i64", 0, 5)
    return (idx,)


def _d_insertGlobalVariable(m):
    return (m.imported_global_count(), "f32", 0, 1.5)


def _d_insertImportFunction(m):
    return (0, "probe", _uname("imp"), ["i32"], [])


def _d_appendImportFunction(m):
    return ("probe", _uname("imp"), [], [])


def _d_modifyImportFunction(m):
    idx = m.imported_function_count()
    semantics.appendImportFunction(m, "probe", _uname("tmp"), [], ["i32"])
    return (idx, "probe2", _uname("ren"))


def _d_deleteImportFunction(m):
    idx = m.imported_function_count()
    semantics.appendImportFunction(m, "probe", _uname("tmp"), ["f64"], [])
    return (idx,)


def _d_insertExportFunction(m):
    return (0, _uname("ex"), 0)


def _d_appendExportFunction(m):
    return (_uname("ex"), total_function_count(m) - 1)


def _d_modifyExportFunction(m):
    pos = len(m.export_sec)
    semantics.appendExportFunction(m, _uname("tmp"), 0)
    return (pos, _uname("ren"))


def _d_deleteExportFunction(m):
    pos = len(m.export_sec)
    semantics.appendExportFunction(m, _uname("tmp"), 0)
    return (pos,)


def _d_appendLinearMemory(m):
    return (1,)


def _d_modifyLinearMemory(m):
    _ensure_memory(m)
    return (8, b"\xfe\xed")


def _d_insertInternalFunction(m):
    return (m.imported_function_count(), ["i32"], ["i32"], ["i64"],
            [Instruction("local.get", 0)])


def _d_insertIndirectFunction(m):
    _ensure_table(m)
    return (total_function_count(m), [], [], [], [Instruction("nop")])


def _d_insertHookFunction(m):
    hooked = total_function_count(m) - 1
    params, results = semantics.getFuncFunctype(m, hooked)
    body = [Instruction("local.get", i) for i in range(len(params))]
    body.append(Instruction("call", hooked))
    return (total_function_count(m), hooked, body, params, results, [])


def _d_deleteFuncInstr(m):
    target = _first_defined(m)
    semantics.insertFuncInstrs(m, target, 0, [Instruction("nop")])
    return (target, 0)


def _d_appendFuncInstrs(m):
    return (_first_defined(m), [Instruction("nop")])


def _d_insertFuncInstrs(m):
    return (_first_defined(m), 0, [Instruction("nop")])


def _d_modifyFuncInstr(m):
    target = _first_defined(m)
    semantics.insertFuncInstrs(m, target, 0, [Instruction("nop")])
    return (target, 0, [Instruction("i32.const", 1), Instruction("drop")])


def _d_appendFuncLocal(m):
    return (_first_defined(m), "f32")


def _d_insertFuncName(m):
    semantics.deleteFuncName(m, 0)
    return (0, _uname("fn"))


def _d_modifyFuncName(m):
    return (0, _uname("fn"))


def _d_deleteFuncName(m):
    semantics.modifyFuncName(m, 0, "tmp")
    return (0,)


def _d_insertGlobalName(m):
    _ensure_global(m)
    semantics.deleteGlobalName(m, 0)
    return (0, _uname("g"))


def _d_modifyGlobalName(m):
    _ensure_global(m)
    return (0, _uname("g"))


def _d_deleteGlobalName(m):
    _ensure_global(m)
    semantics.modifyGlobalName(m, 0, "tmp")
    return (0,)


def _d_insertDataName(m):
    _ensure_data(m)
    semantics.deleteDataName(m, 0)
    return (0, _uname("seg"))


def _d_modifyDataName(m):
    _ensure_data(m)
    return (0, _uname("seg"))


def _d_deleteDataName(m):
    _ensure_data(m)
    semantics.modifyDataName(m, 0, "tmp")
    return (0,)


API_DRIVERS = {
    name: globals()[f"_d_{name}"] for name in semantics.API_NAMES
}
assert len(API_DRIVERS) == 31


def run_api(module: Module, name: str) -> float:
    """Prepare and invoke one named API on ``module``; returns seconds."""
    args = API_DRIVERS[name](module)
    fn = getattr(semantics, name)
    t0 = time.perf_counter()
    result = fn(module, *args)
    elapsed = time.perf_counter() - t0
    if result is False:
        raise RuntimeError(f"{name} returned False under its driver")
    return elapsed


def bench_codec(data: bytes, repeats: int) -> tuple[float, float]:
    decode = encode = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        module, _diags = parse_module(data)
        decode = min(decode, time.perf_counter() - t0)
        t0 = time.perf_counter()
        encode_module(module)
        encode = min(encode, time.perf_counter() - t0)
    return decode, encode


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--corpus", type=Path, default=CORPUS)
    ap.add_argument("--repeats", type=int, default=3,
                    help="codec timing repeats per binary (best-of)")
    ap.add_argument("--json", type=Path, default=None,
                    help="also dump raw timings to this file")
    args = ap.parse_args(argv)

    paths = sorted(args.corpus.glob("*.wasm"))
    if not paths:
        print(f"no .wasm files under {args.corpus}", file=sys.stderr)
        return 1

    blobs = {p.name: p.read_bytes() for p in paths}

    codec_rows = []
    codec_over = []
    for fname, data in blobs.items():
        decode, encode = bench_codec(data, args.repeats)
        codec_rows.append((fname, len(data), decode, encode))
        if len(data) <= CODEC_SIZE_CAP and decode + encode > CODEC_BUDGET:
            codec_over.append(fname)

    print(f"codec timings over {len(paths)} binaries (best of {args.repeats}):")
    print(f"  {'binary':20} {'bytes':>7} {'decode ms':>10} {'encode ms':>10}")
    for fname, size, decode, encode in codec_rows:
        print(f"  {fname:20} {size:7d} {decode * 1e3:10.3f} {encode * 1e3:10.3f}")

    api_times: dict[str, list[float]] = {}
    api_over = []
    for name in semantics.API_NAMES:
        times = []
        for fname, data in blobs.items():
            module, _diags = parse_module(data)
            times.append(run_api(module, name))
        api_times[name] = times
        if max(times) > API_CALL_BUDGET:
            api_over.append(name)

    print(f"\nper-API timings, one call per binary ({len(paths)} calls each):")
    print(f"  {'api':26} {'mean ms':>9} {'max ms':>9}")
    for name in semantics.API_NAMES:
        times = api_times[name]
        print(f"  {name:26} {statistics.fmean(times) * 1e3:9.3f} "
              f"{max(times) * 1e3:9.3f}")

    if args.json:
        dump = {
            "codec": [
                {"binary": f, "bytes": s, "decode_s": d, "encode_s": e}
                for f, s, d, e in codec_rows
            ],
            "api_calls_s": api_times,
        }
        args.json.write_text(json.dumps(dump, indent=2))
        print(f"\nraw timings written to {args.json}")

    ok = True
    if codec_over:
        ok = False
        print(f"\nover codec budget ({CODEC_BUDGET:.0f}s): {', '.join(codec_over)}")
    if api_over:
        ok = False
        print(f"\nover per-call budget ({API_CALL_BUDGET:.0f}s): {', '.join(api_over)}")
    if ok:
        print(f"\nall calls within budget ({API_CALL_BUDGET:.0f}s per API call, "
              f"{CODEC_BUDGET:.0f}s decode+encode)")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
