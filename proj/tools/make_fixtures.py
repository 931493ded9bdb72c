#!/usr/bin/env python3
"""Generate Gmsh MSH v2.2 ASCII fixtures for the plate scenarios.

Meshes are uniform right-triangle grids with cells removed where they
intersect a hole or notch, so node ids are stable and the files are
reproducible without external meshing tools.

Usage: make_fixtures.py [out_dir]
"""

import math
import sys
from pathlib import Path


def grid_mesh(width, height, h, cell_excluded):
    """Uniform triangulated grid, skipping cells where cell_excluded says so.

    Returns (nodes, triangles): nodes is a list of (x, y); triangles index
    into it (0-based). Each kept cell is split A-C: (a, b, c) and (a, c, d)
    with a = lower-left, b = lower-right, c = upper-right, d = upper-left.
    """
    nx = round(width / h)
    ny = round(height / h)
    if abs(nx * h - width) > 1e-9 * width or abs(ny * h - height) > 1e-9 * height:
        raise ValueError(f"h={h} does not divide {width}x{height}")

    def corner(ix, iy):
        return (width * ix / nx, height * iy / ny)

    used = {}
    nodes = []

    def node_id(ix, iy):
        key = iy * (nx + 1) + ix
        if key not in used:
            used[key] = len(nodes)
            nodes.append(corner(ix, iy))
        return used[key]

    tris = []
    for iy in range(ny):
        for ix in range(nx):
            corners = [corner(ix, iy), corner(ix + 1, iy),
                       corner(ix + 1, iy + 1), corner(ix, iy + 1)]
            if cell_excluded(corners):
                continue
            a = node_id(ix, iy)
            b = node_id(ix + 1, iy)
            c = node_id(ix + 1, iy + 1)
            d = node_id(ix, iy + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))
    return nodes, tris


def write_msh(path, nodes, tris):
    with open(path, "w") as f:
        f.write("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n")
        f.write(f"$Nodes\n{len(nodes)}\n")
        for i, (x, y) in enumerate(nodes, start=1):
            f.write(f"{i} {x:.17g} {y:.17g} 0\n")
        f.write("$EndNodes\n")
        f.write(f"$Elements\n{len(tris)}\n")
        for e, (a, b, c) in enumerate(tris, start=1):
            f.write(f"{e} 2 2 0 1 {a + 1} {b + 1} {c + 1}\n")
        f.write("$EndElements\n")
    print(f"{path}: {len(nodes)} nodes, {len(tris)} triangles")


def hole_excluder(cx, cy, r):
    def excluded(corners):
        # Drop the cell if any corner is strictly inside the hole.
        return any((x - cx) ** 2 + (y - cy) ** 2 < r * r - 1e-15
                   for x, y in corners)
    return excluded


def notch_excluder(cx, depth, half_width):
    # Triangular notch rising from the bottom edge: apex (cx, depth),
    # base corners (cx +/- half_width, 0).
    def inside(x, y):
        if y < 0 or y >= depth:
            return False
        w = half_width * (1.0 - y / depth)
        return abs(x - cx) < w - 1e-15
    def excluded(corners):
        return any(inside(x, y) for x, y in corners)
    return excluded


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("fixtures")
    out.mkdir(parents=True, exist_ok=True)

    # Two-triangle unit square, used by IO round-trip tests.
    write_msh(out / "tri2.msh",
              [(0, 0), (1, 0), (1, 1), (0, 1)],
              [(0, 1, 2), (0, 2, 3)])

    # 40x40 mm plate, centered hole r=4 mm, h=0.5 mm.
    w = 0.04
    nodes, tris = grid_mesh(w, w, 0.5e-3, hole_excluder(w / 2, w / 2, 4e-3))
    write_msh(out / "hole_axial.msh", nodes, tris)

    # 60x24 mm beam, bottom-center v-notch depth 6 mm, half-width 3 mm,
    # h=0.5 mm.
    nodes, tris = grid_mesh(0.06, 0.024, 0.5e-3,
                            notch_excluder(0.03, 6e-3, 3e-3))
    write_msh(out / "vnotch_bend.msh", nodes, tris)

    # 30x15 mm plate, hole r=2 mm at (13, 4.5) mm, h=0.2 mm. The edge
    # pre-crack is applied as broken bonds at run time, not in the mesh.
    nodes, tris = grid_mesh(0.03, 0.015, 0.2e-3,
                            hole_excluder(13e-3, 4.5e-3, 2e-3))
    write_msh(out / "hole_precrack.msh", nodes, tris)


if __name__ == "__main__":
    main()
