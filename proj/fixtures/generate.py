"""Writes the JSON fixtures in this directory. Exact rationals throughout."""
import json
from fractions import Fraction as F
from pathlib import Path

HERE = Path(__file__).parent


def q(x):
    x = F(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parity(seq):
    s, v = 1, list(seq)
    for i in range(len(v)):
        for j in range(i + 1, len(v)):
            if v[i] > v[j]:
                s = -s
    return s


def canonical(terms):
    """terms: list of (coeff, tuple of point tuples). Merges equal simplices, drops zeros."""
    acc = {}
    for c, simplex in terms:
        key = tuple(sorted(simplex))
        acc[key] = acc.get(key, 0) + c * parity([key.index(p) for p in simplex])
    return [(c, k) for k, c in sorted(acc.items()) if c != 0]


def boundary(terms):
    out = []
    for c, s in terms:
        for i in range(len(s)):
            out.append(((-1) ** i * c, s[:i] + s[i + 1:]))
    return canonical(out)


def chain_json(terms, dim=4):
    points, index, out = [], {}, []
    for c, s in terms:
        ids = []
        for p in s:
            if p not in index:
                index[p] = len(points)
                points.append(p)
            ids.append(index[p])
        out.append({"coeff": q(c), "simplex": ids})
    return {"ambient_dim": dim, "degree": len(terms[0][1]) - 1 if terms else 2,
            "points": [[q(x) for x in p] for p in points], "terms": out, "reduced_position": True}


def write(name, obj):
    (HERE / name).write_text(json.dumps(obj, indent=1) + "\n")


def tetra_boundary(v, coeff=1):
    return canonical([(coeff * c, s) for c, s in boundary([(1, tuple(v))])])


# Regular tetrahedron with unit edges: total area sqrt(3).
reg = [(0, 0, 0, 0), (1, 0, 0, 0), (F(1, 2), F(1, 2), F(1, 2), F(1, 2)), (F(1, 2), F(5, 6), F(-1, 6), F(-1, 6))]
write("tetra.json", chain_json(tetra_boundary(reg)))


def prism_boundary(triangles, shift, coeff):
    """Boundary of (union of triangles) x [0, shift], as the boundary of a 3-chain of prisms."""
    tets = []
    for tri in triangles:
        srt = sorted(tri)
        sign = parity([srt.index(p) for p in tri])
        a, b, d = srt
        up = lambda p: tuple(F(x) + F(s) for x, s in zip(p, shift))
        tets += [(sign, (a, b, d, up(d))), (-sign, (a, b, up(b), up(d))), (sign, (a, up(a), up(b), up(d)))]
    return [(coeff * c, s) for c, s in boundary(canonical(tets))]


# Unit square in the (x1, y1) complex line, closed up with its reverse translate along
# (0, 0, 1/2, 1/2) and the four bands joining their edges.
sq = [(0, 0, 0, 0), (1, 0, 0, 0), (1, 1, 0, 0), (0, 1, 0, 0)]
sq = [tuple(F(x) for x in p) for p in sq]
holo = prism_boundary([(sq[0], sq[1], sq[2]), (sq[0], sq[2], sq[3])], (0, 0, F(1, 2), F(1, 2)), F(1, 2))
write("holo_cycle.json", chain_json(holo))

# Product of two squares, one in the (x1, y1) line and one in the (x2, y2) line: every face is
# Lagrangian for the standard structure.
def square_loop(i, j):
    pts = []
    for a, b in [(0, 0), (1, 0), (1, 1), (0, 1)]:
        p = [F(0)] * 4
        p[i], p[j] = F(a), F(b)
        pts.append(p)
    return pts


lag = []
A, B = square_loop(0, 1), square_loop(2, 3)
for k in range(4):
    for m in range(4):
        p0 = tuple(x + y for x, y in zip(A[k], B[m]))
        p1 = tuple(x + y for x, y in zip(A[(k + 1) % 4], B[m]))
        p2 = tuple(x + y for x, y in zip(A[(k + 1) % 4], B[(m + 1) % 4]))
        p3 = tuple(x + y for x, y in zip(A[k], B[(m + 1) % 4]))
        lag += [(1, (p0, p1, p2)), (1, (p0, p2, p3))]
write("lagrangian_torus.json", chain_json(canonical(lag)))

# Two tetrahedron boundaries, one in x4 = 0 and one in x1 = 0, crossing transversally twice.
t1 = [(1, 0, 0, 0), (-1, 0, 0, 0), (-1, 4, 0, 0), (-1, 0, 4, 0)]
t2 = [(0, 0, 0, 1), (0, 1, 1, -1), (0, -4, F(1, 2), -1), (0, F(1, 2), -4, -1)]
t1 = [tuple(F(x) for x in p) for p in t1]
t2 = [tuple(F(x) for x in p) for p in t2]
write("two_spheres.json", chain_json(canonical(tetra_boundary(t1) + tetra_boundary(t2))))

write("std_c2.json", {"J": [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]],
                      "omega": [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]})
write("holo_adapted.json", {"kind": "adapted", "surface": "holo_cycle.json", "sigma": 0.002})
write("grid_unit.json", {"lo": ["-1/4"] * 4, "hi": ["5/4"] * 4, "h": "1/4"})
write("pipeline_default.json", {"perturbation_magnitudes": [0.01, 0.003, 0.001], "surgery_budgets": [0.01], "seed": 1})
