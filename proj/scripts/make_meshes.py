#!/usr/bin/env python3
"""Regenerate the bundled Gmsh meshes under data/meshes/.

Requires the `gmsh` Python module. Output is ASCII MSH (2.2 unless noted).
"""
import math
import pathlib
import sys

import gmsh

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "meshes"


def disk(name, radius, lc, platen_deg, version=2.2):
    gmsh.initialize()
    gmsh.option.setNumber("General.Terminal", 0)
    gmsh.model.add(name)
    geo = gmsh.model.geo
    c = geo.addPoint(0, 0, 0, lc)
    angles = [90 - platen_deg, 90 + platen_deg, 270 - platen_deg, 270 + platen_deg]
    pts = [geo.addPoint(radius * math.cos(math.radians(a)),
                        radius * math.sin(math.radians(a)), 0, lc) for a in angles]
    top = geo.addCircleArc(pts[0], c, pts[1])
    left = geo.addCircleArc(pts[1], c, pts[2])
    bottom = geo.addCircleArc(pts[2], c, pts[3])
    right = geo.addCircleArc(pts[3], c, pts[0])
    loop = geo.addCurveLoop([top, left, bottom, right])
    surf = geo.addPlaneSurface([loop])
    geo.synchronize()
    gmsh.model.addPhysicalGroup(1, [top], name="top")
    gmsh.model.addPhysicalGroup(1, [bottom], name="bottom")
    gmsh.model.addPhysicalGroup(2, [surf], name="domain")
    gmsh.model.mesh.generate(2)
    gmsh.option.setNumber("Mesh.MshFileVersion", version)
    gmsh.write(str(OUT / f"{name}.msh"))
    n = len(gmsh.model.mesh.getNodes()[0])
    gmsh.finalize()
    print(f"{name}: {n} nodes")


def square(name, size, lc, version=2.2):
    gmsh.initialize()
    gmsh.option.setNumber("General.Terminal", 0)
    gmsh.model.add(name)
    occ = gmsh.model.occ
    surf = occ.addRectangle(0, 0, 0, size, size)
    occ.synchronize()
    edges = [e[1] for e in gmsh.model.getBoundary([(2, surf)], oriented=False)]
    # edge order from OCC rectangle: bottom, right, top, left
    gmsh.model.addPhysicalGroup(1, [edges[0]], name="bottom")
    gmsh.model.addPhysicalGroup(1, [edges[1]], name="right")
    gmsh.model.addPhysicalGroup(1, [edges[2]], name="top")
    gmsh.model.addPhysicalGroup(1, [edges[3]], name="left")
    gmsh.model.addPhysicalGroup(2, [surf], name="domain")
    gmsh.option.setNumber("Mesh.MeshSizeMin", lc)
    gmsh.option.setNumber("Mesh.MeshSizeMax", lc)
    gmsh.model.mesh.generate(2)
    gmsh.option.setNumber("Mesh.MshFileVersion", version)
    gmsh.write(str(OUT / f"{name}.msh"))
    n = len(gmsh.model.mesh.getNodes()[0])
    gmsh.finalize()
    print(f"{name}: {n} nodes")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    disk("disk_fine", 0.05, 0.0018, 6.0)
    disk("disk_coarse", 0.05, 0.0036, 6.0)
    disk("disk_coarse_v41", 0.05, 0.0036, 6.0, version=4.1)
    square("square_patch", 0.1, 0.0025)
    square("square_small_v41", 1.0, 0.25, version=4.1)
    sys.exit(0)
