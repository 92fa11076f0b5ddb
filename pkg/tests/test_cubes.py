import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randcube import (
    Box,
    ElementaryCube,
    Window,
    boundary_faces,
    cofaces_containing,
    cube_count_formula,
    cube_in_window,
    dimension,
    enumerate_cubes,
    faces_contained_in,
)
from randcube.cubes import all_cubes_box, enumerate_cubes_box


def cube_contains(outer: ElementaryCube, inner: ElementaryCube) -> bool:
    """Interval-wise inclusion oracle, independent of the face machinery."""
    for ob, oe, ib, ie in zip(outer.base, outer.extent, inner.base, inner.extent):
        if not (ob <= ib and ib + ie <= ob + oe):
            return False
    return True


def test_dimension_worked_examples():
    assert dimension(ElementaryCube((0, 0), (0, 0))) == 0
    assert dimension(ElementaryCube((0, 0), (1, 0))) == 1
    assert dimension(ElementaryCube((0, 0), (1, 1))) == 2


def test_boundary_of_edge_signs_and_order():
    got = boundary_faces(ElementaryCube((0, 0), (1, 0)))
    assert [(f.cube, f.sign) for f in got] == [
        (ElementaryCube((1, 0), (0, 0)), 1),
        (ElementaryCube((0, 0), (0, 0)), -1),
    ]


def test_boundary_of_square_signs_and_order():
    got = boundary_faces(ElementaryCube((0, 0), (1, 1)))
    assert [(f.cube, f.sign) for f in got] == [
        (ElementaryCube((1, 0), (0, 1)), 1),
        (ElementaryCube((0, 0), (0, 1)), -1),
        (ElementaryCube((0, 1), (1, 0)), -1),
        (ElementaryCube((0, 0), (1, 0)), 1),
    ]


def test_boundary_of_vertex_is_empty():
    assert boundary_faces(ElementaryCube((0, 0), (0, 0))) == []


def test_boundary_face_count_distinct_contained():
    for d in (1, 2, 3, 4):
        for cube in all_cubes_box(Window(1, d).box):
            faces = boundary_faces(cube)
            assert len(faces) == 2 * cube.dim
            assert len({f.cube for f in faces}) == len(faces)
            for f in faces:
                assert cube_contains(cube, f.cube)
                assert f.cube.dim == cube.dim - 1


def test_signed_double_boundary_cancels():
    # d <= 4, n <= 2 windows: expand the boundary twice and sum signs
    for d in (2, 3, 4):
        for cube in all_cubes_box(Window(2, d).box):
            if cube.dim < 2:
                continue
            acc: dict[ElementaryCube, int] = {}
            for f in boundary_faces(cube):
                for g in boundary_faces(f.cube):
                    key = g.cube
                    acc[key] = acc.get(key, 0) + f.sign * g.sign
            assert all(v == 0 for v in acc.values()), cube


def test_cofaces_of_point_d1():
    got = set(cofaces_containing(ElementaryCube((0,), (0,))))
    assert got == {
        ElementaryCube((0,), (0,)),
        ElementaryCube((-1,), (1,)),
        ElementaryCube((0,), (1,)),
    }


def test_cofaces_top_cube_is_itself():
    sq = ElementaryCube((0, 0), (1, 1))
    assert cofaces_containing(sq) == [sq]


def test_cofaces_of_vertex_d2_count_and_inclusion():
    vertex = ElementaryCube((0, 0), (0, 0))
    cofaces = cofaces_containing(vertex)
    assert len(cofaces) == 9
    # exhaustive inclusion oracle over nearby cubes
    nearby = all_cubes_box(Box((-2, -2), (2, 2)))
    expected = {c for c in nearby if cube_contains(c, vertex)}
    assert set(cofaces) == expected


def test_cofaces_count_formula():
    for d in (1, 2, 3):
        for cube in all_cubes_box(Window(1, d).box):
            cofaces = cofaces_containing(cube)
            assert len(cofaces) == 3 ** (d - cube.dim)
            assert all(cube_contains(c, cube) for c in cofaces)


def test_faces_contained_count_and_inclusion():
    for d in (1, 2, 3, 4):
        top = ElementaryCube((0,) * d, (1,) * d)
        faces = faces_contained_in(top)
        assert len(faces) == 3**d
        assert all(cube_contains(top, f) for f in faces)
        by_dim = {}
        for f in faces:
            by_dim[f.dim] = by_dim.get(f.dim, 0) + 1
        for q in range(d + 1):
            # each d-cube contains exactly C(d,q) 2^(d-q) q-cubes
            assert by_dim[q] == math.comb(d, q) * 2 ** (d - q)


def test_enumerate_counts_match_formula():
    for d in (1, 2, 3, 4):
        for n in (1, 2, 3):
            win = Window(n, d)
            for q in range(d + 1):
                cubes = enumerate_cubes(win, q)
                assert len(cubes) == cube_count_formula(d, n, q)
                assert cubes == sorted(cubes)  # canonical order
                assert all(c.dim == q for c in cubes)


def test_enumerate_d2_n1_examples():
    win = Window(1, 2)
    assert len(enumerate_cubes(win, 1)) == 12
    assert len(enumerate_cubes(win, 2)) == 4


def test_enumerate_q_out_of_range():
    with pytest.raises(ValueError):
        enumerate_cubes(Window(1, 2), 3)


def test_cube_in_window_boundary_cases():
    n = 3
    win = Window(n, 2)
    assert cube_in_window(ElementaryCube((n - 1, n), (1, 0)), win)
    assert not cube_in_window(ElementaryCube((n, 0), (1, 0)), win)
    assert cube_in_window(ElementaryCube((-n, -n), (0, 0)), win)


def test_canonical_text_round_trip():
    for cube in all_cubes_box(Window(2, 3).box):
        assert ElementaryCube.from_canonical(cube.canonical()) == cube
    assert ElementaryCube((-1, 2), (1, 0)).canonical() == "2;-1,2;10"


def test_window_volume():
    assert Window(3, 2).volume == 36.0
    assert Window(2, 3).volume == 64.0


def test_box_gap():
    a = Box((-2, -2), (2, 2))
    b = Box((4, -1), (6, 1))
    assert a.max_norm_gap(b) == 2
    assert a.max_norm_gap(a) == 0


def test_enumerate_box_respects_bounds():
    box = Box((0, -1), (1, 1))
    for q in (0, 1, 2):
        for cube in enumerate_cubes_box(box, q):
            assert box.contains_cube(cube)


@st.composite
def cubes(draw, max_d=4):
    d = draw(st.integers(1, max_d))
    base = tuple(draw(st.integers(-5, 5)) for _ in range(d))
    extent = tuple(draw(st.integers(0, 1)) for _ in range(d))
    return ElementaryCube(base, extent)


@settings(max_examples=150, deadline=None)
@given(cubes())
def test_boundary_structure_property(cube):
    faces = boundary_faces(cube)
    assert len(faces) == 2 * cube.dim
    assert len({f.cube for f in faces}) == len(faces)
    assert sum(f.sign for f in faces) == 0
    acc = {}
    for f in faces:
        for g in boundary_faces(f.cube):
            acc[g.cube] = acc.get(g.cube, 0) + f.sign * g.sign
    assert all(v == 0 for v in acc.values())


@settings(max_examples=150, deadline=None)
@given(cubes(max_d=3))
def test_face_coface_duality_property(cube):
    assert len(faces_contained_in(cube)) == 3 ** cube.dim
    cofaces = cofaces_containing(cube)
    assert len(cofaces) == 3 ** (cube.ambient_dim - cube.dim)
    for other in cofaces:
        assert cube in faces_contained_in(other)
