"""LEB128 varint codec (unsigned and signed, 32/64-bit widths).

Decoding is strict the way conforming binary validators are strict: a
varint may be non-minimal, but it may not exceed ceil(bits/7) bytes and
the unused high bits of the final byte must be zero (unsigned) or sign
extension (signed).
"""

from .errors import FormatError, TruncatedError

_MAX_LEN = {32: 5, 64: 10}


def encode_uleb128(value: int, bits: int = 32) -> bytes:
    if value < 0 or value >= (1 << bits):
        raise OverflowError(f"{value} out of range for unsigned {bits}-bit varint")
    out = bytearray()
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def encode_sleb128(value: int, bits: int = 32) -> bytes:
    if value < -(1 << (bits - 1)) or value >= (1 << (bits - 1)):
        raise OverflowError(f"{value} out of range for signed {bits}-bit varint")
    out = bytearray()
    while True:
        byte = value & 0x7F
        value >>= 7
        # done when the remaining bits are pure sign extension of this byte
        if (value == 0 and not byte & 0x40) or (value == -1 and byte & 0x40):
            out.append(byte)
            return bytes(out)
        out.append(byte | 0x80)


def decode_uleb128(buf, offset: int = 0, bits: int = 32) -> tuple[int, int]:
    """Return (value, bytes consumed) reading at ``offset``."""
    max_len = _MAX_LEN[bits]
    result = 0
    shift = 0
    pos = offset
    end = len(buf)
    for i in range(max_len):
        if pos >= end:
            raise TruncatedError("varint runs past end of input", offset)
        byte = buf[pos]
        pos += 1
        if i == max_len - 1:
            unused = byte >> (bits - 7 * (max_len - 1))
            if byte & 0x80 or unused:
                raise FormatError(f"unsigned {bits}-bit varint too long", offset)
        result |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return result, pos - offset
        shift += 7
    raise FormatError(f"unsigned {bits}-bit varint too long", offset)


def decode_sleb128(buf, offset: int = 0, bits: int = 32) -> tuple[int, int]:
    """Return (value, bytes consumed) reading at ``offset``."""
    max_len = _MAX_LEN[bits]
    result = 0
    shift = 0
    pos = offset
    end = len(buf)
    for i in range(max_len):
        if pos >= end:
            raise TruncatedError("varint runs past end of input", offset)
        byte = buf[pos]
        pos += 1
        if i == max_len - 1:
            used = bits - 7 * (max_len - 1)
            top = byte >> (used - 1)
            if byte & 0x80 or (top != 0 and top != (1 << (8 - used)) - 1):
                raise FormatError(f"signed {bits}-bit varint too long", offset)
        result |= (byte & 0x7F) << shift
        shift += 7
        if not byte & 0x80:
            if byte & 0x40:
                result -= 1 << shift
            return result, pos - offset
    raise FormatError(f"signed {bits}-bit varint too long", offset)


def min_uleb128_size(value: int) -> int:
    return max(1, (value.bit_length() + 6) // 7)


def min_sleb128_size(value: int) -> int:
    size = 1
    while not (-(1 << (7 * size - 1)) <= value < (1 << (7 * size - 1))):
        size += 1
    return size
