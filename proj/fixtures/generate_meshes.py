#!/usr/bin/env python3
"""Generate the binary STL fixture meshes (axis-aligned boxes).

Run from the fixtures/ directory:  python3 generate_meshes.py
The committed meshes/*.stl files are this script's output.
"""
import struct
from pathlib import Path

OUT = Path(__file__).parent / "meshes"


def box_triangles(lo, hi):
    (x0, y0, z0), (x1, y1, z1) = lo, hi
    v = [
        (x0, y0, z0), (x1, y0, z0), (x1, y1, z0), (x0, y1, z0),  # bottom ring
        (x0, y0, z1), (x1, y0, z1), (x1, y1, z1), (x0, y1, z1),  # top ring
    ]
    quads = [
        (0, 3, 2, 1),  # -z
        (4, 5, 6, 7),  # +z
        (0, 1, 5, 4),  # -y
        (2, 3, 7, 6),  # +y
        (1, 2, 6, 5),  # +x
        (3, 0, 4, 7),  # -x
    ]
    tris = []
    for a, b, c, d in quads:
        tris.append((v[a], v[b], v[c]))
        tris.append((v[a], v[c], v[d]))
    return tris


def write_stl(path, triangles):
    with open(path, "wb") as f:
        f.write(b"rtms fixture mesh".ljust(80, b"\0"))
        f.write(struct.pack("<I", len(triangles)))
        for tri in triangles:
            f.write(struct.pack("<3f", 0.0, 0.0, 0.0))  # normal unused
            for vertex in tri:
                f.write(struct.pack("<3f", *vertex))
            f.write(struct.pack("<H", 0))
    print(f"{path}: {len(triangles)} triangles, {path.stat().st_size} bytes")


BOXES = {
    "robot_base.stl": ((-60, -60, 0), (60, 60, 40)),
    "flange.stl": ((-25, -25, 0), (25, 25, 12)),
    "coil_tag.stl": ((-15, -15, 0), (15, 15, 3)),
    "coil.stl": ((-35, -20, -12), (35, 20, 0)),
    "head.stl": ((-70, -90, -80), (70, 90, 80)),
    "stylus.stl": ((-4, -4, -120), (4, 4, 0)),
}


def main():
    OUT.mkdir(exist_ok=True)
    for name, (lo, hi) in BOXES.items():
        write_stl(OUT / name, box_triangles(lo, hi))
    # One-triangle mesh for the size-formula check (84 + 50 bytes).
    write_stl(OUT / "single_triangle.stl",
              [((0, 0, 0), (1, 0, 0), (0, 1, 0))])


if __name__ == "__main__":
    main()
