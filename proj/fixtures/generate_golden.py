#!/usr/bin/env python3
"""Generate the golden OpenIGTLink wire vectors in golden/.

Frames are constructed byte by byte from the published wire layout
(v1 58-byte big-endian header; TRANSFORM, STATUS, and v2 POLYDATA
bodies) with an independent bitwise CRC-64/ECMA-182, so the vectors pin
the codec without sharing any code with it.

Run from the fixtures/ directory:  python3 generate_golden.py
"""
import struct
from pathlib import Path

OUT = Path(__file__).parent / "golden"

POLY = 0x42F0E1EBA9EA3693
MASK = 0xFFFFFFFFFFFFFFFF


def crc64(data: bytes) -> int:
    crc = 0
    for byte in data:
        crc ^= byte << 56
        for _ in range(8):
            if crc & 0x8000000000000000:
                crc = ((crc << 1) ^ POLY) & MASK
            else:
                crc = (crc << 1) & MASK
    return crc


def frame(type_name: str, device: str, seconds: int, fraction: int, body: bytes) -> bytes:
    header = struct.pack(
        ">H12s20sIIQQ",
        1,
        type_name.encode().ljust(12, b"\0"),
        device.encode().ljust(20, b"\0"),
        seconds,
        fraction,
        len(body),
        crc64(body),
    )
    assert len(header) == 58
    return header + body


def transform_frame():
    # Rotation of 90 degrees about S(z), translation (10, 20, 30) mm.
    # Column-major: three rotation columns, then translation.
    floats = [0, 1, 0, -1, 0, 0, 0, 0, 1, 10, 20, 30]
    body = struct.pack(">12f", *floats)
    return frame("TRANSFORM", "GoldenTransform", 1700000000, 2147483648, body)


def status_frame():
    message = b"calibration complete"
    body = struct.pack(">Hq20s", 1, 0, b"OK".ljust(20, b"\0")) + message
    assert len(body) == 30 + len(message)
    return frame("STATUS", "GoldenStatus", 1700000000, 0, body)


def polydata_frame():
    points = [(0, 0, 0), (10, 0, 0), (0, 10, 0)]
    polygons = [[0, 1, 2]]
    size_polygons = sum(4 * (1 + len(p)) for p in polygons)
    body = struct.pack(
        ">10I",
        len(points),  # npoints
        0, 0,         # nvertices, size_vertices
        0, 0,         # nlines, size_lines
        len(polygons), size_polygons,
        0, 0,         # ntriangle_strips, size_triangle_strips
        0,            # nattributes
    )
    for p in points:
        body += struct.pack(">3f", *p)
    for poly in polygons:
        body += struct.pack(f">{1 + len(poly)}I", len(poly), *poly)
    return frame("POLYDATA", "GoldenPolyData", 1700000000, 4294967, body)


def main():
    OUT.mkdir(exist_ok=True)
    vectors = {
        "transform.bin": transform_frame(),
        "status.bin": status_frame(),
        "polydata.bin": polydata_frame(),
    }
    for name, data in vectors.items():
        (OUT / name).write_bytes(data)
        print(f"{name}: {len(data)} bytes, body crc64=0x{crc64(data[58:]):016X}")
    # Catalog self-check for the CRC routine itself.
    check = crc64(b"123456789")
    print(f'crc64("123456789") = 0x{check:016X}')
    assert check == 0x6C40DF5F0B497347, "CRC-64/ECMA-182 catalog check failed"


if __name__ == "__main__":
    main()
