#!/usr/bin/env python3
"""Elementary cubes and exact cubical homology, from the ground up.

Walks through the atoms of the library: what an elementary cube is, how its
signed boundary looks, and how Betti numbers of a bounded cubical set are
computed exactly over GF(p).
"""

from randcube import (
    ElementaryCube,
    RationalField,
    Window,
    betti,
    boundary_faces,
    boundary_matrix,
    cofaces_containing,
    cube_count_formula,
    enumerate_cubes,
    faces_contained_in,
    rank,
)

# An elementary cube is a product of intervals [l, l+1] or {l}.  The unit
# square in the plane:
square = ElementaryCube(base=(0, 0), extent=(1, 1))
print(f"square {square.canonical()} has dimension {square.dim}")

# Its boundary is a signed chain of the four edges.  Signs alternate with the
# index of the nondegenerate axis, so the square's boundary is the familiar
# oriented loop:
for face in boundary_faces(square):
    sign = "+" if face.sign > 0 else "-"
    print(f"  {sign}{face.cube.canonical()}")

# Faces and cofaces: a cube contains 3^dim cubes and is contained in
# 3^(d - dim) cubes.
vertex = ElementaryCube((0, 0), (0, 0))
print(f"\nvertex has {len(cofaces_containing(vertex))} cofaces (3^2)")
print(f"square contains {len(faces_contained_in(square))} cubes (3^2)")

# Windows: the region [-n, n]^d.  Counting q-cubes has a closed form.
win = Window(2, 2)
for q in range(3):
    n_q = len(enumerate_cubes(win, q))
    assert n_q == cube_count_formula(2, 2, q)
    print(f"window [-2,2]^2 holds {n_q} cubes of dimension {q}")

# Homology: the full square is contractible; the hollow square has a loop.
full = faces_contained_in(square)
hollow = [c for c in full if c.dim < 2]
print(f"\nbetti(full square)   = {[betti(full, q) for q in (0, 1)]}")
print(f"betti(hollow square) = {[betti(hollow, q) for q in (0, 1)]}")

# Everything is exact linear algebra over GF(2^31 - 1); rationals are
# available as a cross-check mode and must agree.
mat = boundary_matrix(hollow, 1)
print(f"\nboundary matrix of the hollow square: shape {mat.shape}, "
      f"rank {rank(mat)}")
assert betti(hollow, 1) == betti(hollow, 1, RationalField()) == 1
print("GF(p) and exact-rational Betti numbers agree")
