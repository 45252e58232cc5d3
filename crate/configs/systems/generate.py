#!/usr/bin/env python3
"""Writes the reduced-mesh system files used by the wave2d and hydration configs.

    python3 configs/systems/generate.py

Both meshes are structured so the control points fall on nodes.
"""

import math
from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent


def write_system(path, kind, matrices, inputs):
    n = matrices["K"].shape[0]
    lines = [f"kind: {kind}", f"n: {n}"]
    for name, m in matrices.items():
        lines.append(f"matrix {name}")
        rows, cols = np.nonzero(m)
        for i, j in zip(rows, cols):
            lines.append(f"{i + 1} {j + 1} {m[i, j]:.17e}")
    for f0, model in inputs:
        lines.append("input")
        lines.append("f0: " + " ".join(f"{v:.17e}" for v in f0))
        lines.append(f"model: {model}")
    path.write_text("\n".join(lines) + "\n")
    print(f"{path.name}: n = {n}, {sum(np.count_nonzero(m) for m in matrices.values())} entries")


def wave2d(cells=10, size=3200.0):
    """Plane-strain half domain [0, size]^2 with linear triangles.

    Left edge is the symmetry axis (u_x = 0), bottom and right edges are
    fixed, top edge is free. Half of a 2e6 N step load pushes down at the top
    of the symmetry axis.
    """
    young, nu, rho = 1.8773e10, 0.25, 2200.0
    h = size / cells
    nodes = [(i * h, j * h) for j in range(cells + 1) for i in range(cells + 1)]
    nid = lambda i, j: j * (cells + 1) + i
    tris = []
    for j in range(cells):
        for i in range(cells):
            a, b, c, d = nid(i, j), nid(i + 1, j), nid(i + 1, j + 1), nid(i, j + 1)
            tris += [(a, b, c), (a, c, d)]

    lam = young * nu / ((1 + nu) * (1 - 2 * nu))
    mu = young / (2 * (1 + nu))
    dmat = np.array([[lam + 2 * mu, lam, 0], [lam, lam + 2 * mu, 0], [0, 0, mu]])
    ndof = 2 * len(nodes)
    k = np.zeros((ndof, ndof))
    m = np.zeros(ndof)
    for tri in tris:
        xy = np.array([nodes[t] for t in tri])
        area = 0.5 * abs(np.linalg.det(np.column_stack([np.ones(3), xy])))
        b = np.array([xy[1, 1] - xy[2, 1], xy[2, 1] - xy[0, 1], xy[0, 1] - xy[1, 1]])
        c = np.array([xy[2, 0] - xy[1, 0], xy[0, 0] - xy[2, 0], xy[1, 0] - xy[0, 0]])
        bmat = np.zeros((3, 6))
        bmat[0, 0::2] = b
        bmat[1, 1::2] = c
        bmat[2, 0::2] = c
        bmat[2, 1::2] = b
        bmat /= 2 * area
        ke = area * bmat.T @ dmat @ bmat
        dofs = [2 * t + s for t in tri for s in range(2)]
        k[np.ix_(dofs, dofs)] += ke
        m[dofs] += rho * area / 3

    fixed = set()
    for j in range(cells + 1):
        fixed.add(2 * nid(0, j))
        fixed.update({2 * nid(cells, j), 2 * nid(cells, j) + 1})
    for i in range(cells + 1):
        fixed.update({2 * nid(i, 0), 2 * nid(i, 0) + 1})
    free = [d for d in range(ndof) if d not in fixed]
    index = {d: r for r, d in enumerate(free)}

    f0 = np.zeros(len(free))
    f0[index[2 * nid(0, cells) + 1]] = -1.0
    a = nid(int(round(2560.0 / h)), cells)
    print(f"wave2d: node A horizontal displacement is state index {index[2 * a]}")
    kk = k[np.ix_(free, free)]
    mm = np.diag(m[free])
    write_system(HERE / "wave2d.sys", "dynamics", {"K": kk, "M": mm}, [(f0, "constant 1e6")])


def hydration(nx=4, nz=10):
    """Quarter of the cuboid [-1,1]^2 x [0,1] with four-node tetrahedra.

    Faces x = 0 and y = 0 are symmetry planes. The top face convects to air,
    the others to the formwork, both towards the ambient temperature.
    """
    kappa, rho, c = 9.37, 2485.0, 0.967
    h_air, h_timb = 40.0, 500.0
    t_min, t_var, omega, rate = 17.0, 6.0, math.pi / 12, 7.95e-3
    xs = np.linspace(0, 1, nx + 1)
    zs = np.linspace(0, 1, nz + 1)
    nid = lambda i, j, l: (l * (nx + 1) + j) * (nx + 1) + i
    pts = np.array([(x, y, z) for z in zs for y in xs for x in xs])
    tets = []
    for l in range(nz):
        for j in range(nx):
            for i in range(nx):
                v = [nid(i + a, j + b, l + e) for e in (0, 1) for b in (0, 1) for a in (0, 1)]
                # Kuhn split of the cube along the 0-7 diagonal.
                for p in ([1, 3], [3, 2], [2, 6], [6, 4], [4, 5], [5, 1]):
                    tets.append((v[0], v[p[0]], v[p[1]], v[7]))

    n = len(pts)
    k = np.zeros((n, n))
    cap = np.zeros((n, n))
    lumped = np.zeros(n)
    for tet in tets:
        x = pts[list(tet)]
        jac = np.column_stack([x[1] - x[0], x[2] - x[0], x[3] - x[0]])
        vol = abs(np.linalg.det(jac)) / 6
        grads = np.linalg.solve(jac.T, np.array([[-1, 1, 0, 0], [-1, 0, 1, 0], [-1, 0, 0, 1]], float))
        k[np.ix_(tet, tet)] += kappa * vol * grads.T @ grads
        cap[np.ix_(tet, tet)] += rho * c * vol / 20 * (np.ones((4, 4)) + np.eye(4))
        lumped[list(tet)] += vol / 4

    robin = np.zeros(n)
    faces = []
    for j in range(nx):
        for i in range(nx):
            faces.append(((nid(i, j, nz), nid(i + 1, j, nz), nid(i + 1, j + 1, nz), nid(i, j + 1, nz)), h_air))
            faces.append(((nid(i, j, 0), nid(i + 1, j, 0), nid(i + 1, j + 1, 0), nid(i, j + 1, 0)), h_timb))
    for l in range(nz):
        for j in range(nx):
            faces.append(((nid(nx, j, l), nid(nx, j + 1, l), nid(nx, j + 1, l + 1), nid(nx, j, l + 1)), h_timb))
            faces.append(((nid(j, nx, l), nid(j + 1, nx, l), nid(j + 1, nx, l + 1), nid(j, nx, l + 1)), h_timb))
    for quad, hc in faces:
        for tri in ((quad[0], quad[1], quad[2]), (quad[0], quad[2], quad[3])):
            x = pts[list(tri)]
            area = 0.5 * np.linalg.norm(np.cross(x[1] - x[0], x[2] - x[0]))
            k[np.ix_(tri, tri)] += hc * area / 12 * (np.ones((3, 3)) + np.eye(3))
            robin[list(tri)] += hc * area / 3

    for name, z in (("A", 0.6), ("B", 0.9)):
        print(f"hydration: control point {name} is state index {nid(0, 0, int(round(z * nz)))}")
    inputs = [
        (robin, f"constant {t_min + t_var / 2}"),
        (rho * rate * lumped, f"exponential {-rate} 313.5 346.5"),
        (robin, f"sinusoid {omega} {-t_var / 2} 0"),
    ]
    write_system(HERE / "hydration.sys", "heat", {"K": k, "C": cap}, inputs)


if __name__ == "__main__":
    wave2d()
    hydration()
