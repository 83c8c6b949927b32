"""Shared fixtures: raw byte builders (independent of the encoder) and a
small hand-assembled module used as a known-answer fixture."""

import os
import shutil
import subprocess
from pathlib import Path

import pytest

CORPUS_DIR = Path(__file__).parent / "fixtures" / "corpus"


# ---- raw byte builders (kept independent of wasmedit.encoder on purpose)

def uleb(n: int) -> bytes:
    out = bytearray()
    while True:
        b = n & 0x7F
        n >>= 7
        if n:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def sleb(n: int) -> bytes:
    out = bytearray()
    while True:
        b = n & 0x7F
        n >>= 7
        if (n == 0 and not b & 0x40) or (n == -1 and b & 0x40):
            out.append(b)
            return bytes(out)
        out.append(b | 0x80)


def vec(items: list[bytes]) -> bytes:
    return uleb(len(items)) + b"".join(items)


def wname(s: str) -> bytes:
    raw = s.encode("utf-8")
    return uleb(len(raw)) + raw


def section(section_id: int, payload: bytes) -> bytes:
    return bytes([section_id]) + uleb(len(payload)) + payload


def header() -> bytes:
    return b"\x00asm\x01\x00\x00\x00"


VT = {"i32": 0x7F, "i64": 0x7E, "f32": 0x7D, "f64": 0x7C}


def functype(params: list[str], results: list[str]) -> bytes:
    return (b"\x60" + vec([bytes([VT[p]]) for p in params])
            + vec([bytes([VT[r]]) for r in results]))


def i32_const_expr(value: int) -> bytes:
    return b"\x41" + sleb(value) + b"\x0b"


def lean_bytes() -> bytes:
    """Two types, two function imports, one internal function, a 5-entry
    table with one elem entry.  Known-answer fixture for the parser."""
    type_sec = vec([functype(["i32"], ["i32"]), functype(["i32"], [])])
    import_sec = vec([
        wname("env") + wname("sqrt") + b"\x00" + uleb(0),
        wname("env") + wname("print") + b"\x00" + uleb(0),
    ])
    func_sec = vec([uleb(0)])
    table_sec = vec([b"\x70\x01" + uleb(5) + uleb(5)])
    elem_sec = vec([uleb(0) + i32_const_expr(1) + vec([uleb(1)])])
    body = (
        vec([uleb(1) + bytes([VT["i32"]])])  # one i32 local
        + b"\x03\x40"  # loop (empty block type)
        + b"\x0b"      # end (loop)
        + b"\x20\x00"  # local.get 0
        + b"\x10\x00"  # call 0
        + b"\x0b"      # end (body)
    )
    code_sec = vec([uleb(len(body)) + body])
    return (header()
            + section(1, type_sec)
            + section(2, import_sec)
            + section(3, func_sec)
            + section(4, table_sec)
            + section(9, elem_sec)
            + section(10, code_sec))


@pytest.fixture
def lean() -> bytes:
    return lean_bytes()


def rich_bytes() -> bytes:
    """A module touching every decoded section: imported and defined
    globals, table + elem, memory + data, exports, start, name maps."""
    type_sec = vec([functype(["i32"], ["i32"]), functype([], [])])
    import_sec = vec([
        wname("env") + wname("log") + b"\x00" + uleb(0),      # func idx 0
        wname("env") + wname("g") + b"\x03" + bytes([VT["i32"], 0]),  # global idx 0
    ])
    func_sec = vec([uleb(0), uleb(1), uleb(1)])  # func idx 1, 2, 3
    table_sec = vec([b"\x70\x01" + uleb(4) + uleb(8)])
    mem_sec = vec([b"\x01" + uleb(1) + uleb(2)])
    global_sec = vec([
        bytes([VT["i32"], 1]) + i32_const_expr(10),           # global idx 1
        bytes([VT["i64"], 0]) + b"\x42" + sleb(5) + b"\x0b",  # global idx 2
    ])
    export_sec = vec([
        wname("run") + b"\x00" + uleb(2),
        wname("mem") + b"\x02" + uleb(0),
        wname("gx") + b"\x03" + uleb(1),
    ])
    start_sec = uleb(3)
    elem_sec = vec([uleb(0) + i32_const_expr(0) + vec([uleb(1), uleb(2)])])
    body1 = (vec([])
             + b"\x20\x00"          # local.get 0
             + b"\x23\x01"          # global.get 1
             + b"\x6a"              # i32.add
             + b"\x10\x00"          # call 0
             + b"\x0b")
    body2 = (vec([uleb(1) + bytes([VT["i32"]])])
             + b"\x41\x03"          # i32.const 3
             + b"\x10\x01"          # call 1
             + b"\x1a"              # drop
             + b"\x23\x00"          # global.get 0
             + b"\x1a"              # drop
             + b"\x0b")
    body3 = vec([]) + b"\x01\x0b"   # nop, end
    code_sec = vec([uleb(len(b)) + b for b in (body1, body2, body3)])
    data_sec = vec([uleb(0) + i32_const_expr(8) + uleb(3) + b"abc"])
    name_payload = (
        bytes([1]) + uleb(len(p := vec([uleb(0) + wname("log"),
                                        uleb(1) + wname("one")]))) + p
        + bytes([7]) + uleb(len(q := vec([uleb(1) + wname("g1")]))) + q
        + bytes([9]) + uleb(len(r := vec([uleb(0) + wname("blob")]))) + r
    )
    return (header()
            + section(1, type_sec)
            + section(2, import_sec)
            + section(3, func_sec)
            + section(4, table_sec)
            + section(5, mem_sec)
            + section(6, global_sec)
            + section(7, export_sec)
            + section(8, start_sec)
            + section(9, elem_sec)
            + section(10, code_sec)
            + section(11, data_sec)
            + section(0, wname("name") + name_payload))


@pytest.fixture
def rich() -> bytes:
    return rich_bytes()


@pytest.fixture(scope="session")
def corpus_paths() -> list[Path]:
    paths = sorted(CORPUS_DIR.glob("*.wasm"))
    if not paths:
        pytest.skip("corpus not generated (run scripts/make_corpus.py)")
    return paths


@pytest.fixture(scope="session")
def corpus_bytes(corpus_paths) -> dict[str, bytes]:
    return {p.name: p.read_bytes() for p in corpus_paths}


def _node_validator():
    node = shutil.which("node")
    if node is None:
        return None

    js = ("process.exit(WebAssembly.validate("
          "require('fs').readFileSync(process.argv[1])) ? 0 : 1)")

    def run(data: bytes) -> bool:
        import tempfile

        with tempfile.NamedTemporaryFile(suffix=".wasm", delete=False) as tmp:
            tmp.write(data)
            path = tmp.name
        try:
            proc = subprocess.run([node, "-e", js, path], capture_output=True)
            return proc.returncode == 0
        finally:
            os.unlink(path)

    return run


@pytest.fixture(scope="session")
def external_ok():
    """Callable bytes -> bool using an engine-grade validator, or skip."""
    run = _node_validator()
    if run is None:
        pytest.skip("no external validator available")
    return run
