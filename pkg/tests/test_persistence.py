import io
import math

import numpy as np
import pytest

from randcube import (
    ElementaryCube,
    Filtration,
    PersistenceDiagram,
    RationalField,
    Window,
    betti,
    boundary_faces,
    compute_diagram,
    faces_contained_in,
    parse_diagram,
    persistent_betti_direct,
    quadrant_mass,
    read_diagram,
    rectangle_mass,
    sublevel,
    validate,
    write_diagram,
)
from randcube.cubes import all_cubes_box

INF = math.inf
SQUARE = ElementaryCube((0, 0), (1, 1))


def hollow_square_then_fill() -> Filtration:
    """Edges and vertices of [0,1]^2 born at 1, the square itself at 2."""
    births = {c: (2.0 if c == SQUARE else 1.0) for c in faces_contained_in(SQUARE)}
    return Filtration(Window(2, 2), births)


def random_filtration(d, n, seed):
    rng = np.random.default_rng(seed)
    cubes = all_cubes_box(Window(n, d).box)
    births = {c: (int(v) + 1) / 10 for c, v in
              zip(cubes, rng.integers(0, 10, size=len(cubes)))}
    for cube in sorted(cubes, key=lambda c: c.dim):
        for f in boundary_faces(cube):
            if births[f.cube] > births[cube]:
                births[cube] = max(births[cube], births[f.cube])
    return Filtration(Window(n, d), births)


# --- validation ----------------------------------------------------------------

def test_validate_ok_edge_after_endpoints():
    edge = ElementaryCube((0,), (1,))
    births = {edge: 1.0,
              ElementaryCube((0,), (0,)): 0.0,
              ElementaryCube((1,), (0,)): 0.0}
    assert validate(Filtration(Window(1, 1), births)) is None


def test_validate_reports_first_violation():
    edge = ElementaryCube((0,), (1,))
    vertex = ElementaryCube((1,), (0,))
    births = {edge: 0.0, ElementaryCube((0,), (0,)): 0.0, vertex: 1.0}
    violation = validate(Filtration(Window(1, 1), births))
    assert violation == (vertex, edge)


def test_validate_empty_filtration():
    assert validate(Filtration(Window(1, 2), {})) is None


def test_all_infinite_births_is_empty():
    f = Filtration(Window(1, 1), {ElementaryCube((0,), (0,)): INF})
    assert f.births == {}
    assert validate(f) is None


def test_birth_outside_window_rejected():
    with pytest.raises(ValueError, match="outside"):
        Filtration(Window(1, 1), {ElementaryCube((5,), (0,)): 0.0})


# --- sublevel sets ---------------------------------------------------------------

def test_sublevel_below_all_births():
    assert sublevel(hollow_square_then_fill(), 0.5) == []


def test_sublevel_at_max_birth():
    f = hollow_square_then_fill()
    assert len(sublevel(f, 2.0)) == 9


def test_sublevel_hollow_stage():
    f = hollow_square_then_fill()
    cubes = sublevel(f, 1.5)
    assert len(cubes) == 8 and SQUARE not in cubes
    assert cubes == sorted(cubes)


# --- diagrams ---------------------------------------------------------------------

def test_diagram_hollow_square_then_fill():
    diagram = compute_diagram(hollow_square_then_fill())
    assert diagram.degree(1) == [(1.0, 2.0)]
    assert diagram.degree(0) == [(1.0, INF)]


def test_diagram_of_empty_filtration():
    diagram = compute_diagram(Filtration(Window(1, 2), {}))
    assert diagram.pairs == {}


def test_diagram_single_vertex():
    diagram = compute_diagram(
        Filtration(Window(1, 2), {ElementaryCube((0, 0), (0, 0)): 0.0})
    )
    assert diagram.degree(0) == [(0.0, INF)]


def test_diagram_rejects_invalid_filtration():
    edge = ElementaryCube((0,), (1,))
    births = {edge: 0.0,
              ElementaryCube((0,), (0,)): 0.0,
              ElementaryCube((1,), (0,)): 1.0}
    with pytest.raises(ValueError, match="monotone"):
        compute_diagram(Filtration(Window(1, 1), births))


def test_diagram_matches_quadrant_oracle_on_grid():
    # brute-force check of the hollow-square diagram through quadrant masses
    f = hollow_square_then_fill()
    diagram = compute_diagram(f)
    for q in (0, 1):
        for s in (0.5, 1.0, 1.5, 2.0):
            for t in (0.5, 1.0, 1.5, 2.0, 2.5):
                if s > t:
                    continue
                assert quadrant_mass(diagram, q, s, t) == \
                    persistent_betti_direct(f, q, s, t)


def test_diagram_tie_order_invariance():
    rng = np.random.default_rng(7)
    for seed in range(20):
        f = random_filtration(2, 2, 5000 + seed)
        reference = compute_diagram(f)
        perm = {c: int(k) for c, k in
                zip(sorted(f.births), rng.permutation(len(f.births)))}
        shuffled = compute_diagram(f, _tie_key=lambda c: perm[c])
        assert shuffled == reference


def test_diagram_field_independence():
    for seed in range(5):
        f = random_filtration(2, 2, 6000 + seed)
        assert compute_diagram(f) == compute_diagram(f, field=RationalField())


def test_total_mass_bound():
    for seed in range(10):
        d, n = (2, 3) if seed % 2 == 0 else (3, 2)
        f = random_filtration(d, n, 6100 + seed)
        diagram = compute_diagram(f)
        for q in range(d + 1):
            n_q = sum(1 for c in f.births if c.dim == q)
            assert diagram.total_count(q) <= n_q


# --- persistent Betti, direct route ------------------------------------------------

def test_pb_direct_hollow_square():
    f = hollow_square_then_fill()
    assert persistent_betti_direct(f, 1, 1.0, 1.5) == 1
    assert persistent_betti_direct(f, 1, 1.0, 2.0) == 0


def test_pb_equals_betti_on_diagonal():
    for seed in range(10):
        f = random_filtration(2, 2, 7000 + seed)
        for q in (0, 1):
            for t in (0.2, 0.5, 0.8, 1.0):
                cubes = sublevel(f, t)
                expect = betti(cubes, q) if cubes else 0
                assert persistent_betti_direct(f, q, t, t) == expect


def test_pb_direct_rejects_bad_arguments():
    f = hollow_square_then_fill()
    with pytest.raises(ValueError):
        persistent_betti_direct(f, 1, 2.0, 1.0)
    with pytest.raises(ValueError):
        persistent_betti_direct(f, 2, 0.5, 1.0)


def test_k_triangle_and_monotonicity_random_corpus():
    grid = (0.15, 0.35, 0.55, 0.75, 0.95)
    for seed in range(30):
        d = 2 if seed % 3 else 3
        f = random_filtration(d, 2 if d == 2 else 1, 8000 + seed)
        diagram = compute_diagram(f)
        for q in range(d):
            values = {}
            for s in grid:
                for t in grid:
                    if s > t:
                        continue
                    pb = persistent_betti_direct(f, q, s, t)
                    assert pb == quadrant_mass(diagram, q, s, t)
                    values[(s, t)] = pb
            # nondecreasing in s, nonincreasing in t
            for (s, t), v in values.items():
                for (s2, t2), w in values.items():
                    if t2 == t and s2 >= s:
                        assert w >= v
                    if s2 == s and t2 >= t:
                        assert w <= v


# --- quadrant and rectangle masses ---------------------------------------------------

def test_quadrant_mass_examples():
    diagram = compute_diagram(hollow_square_then_fill())
    assert quadrant_mass(diagram, 1, 1.0, 1.5) == 1
    assert quadrant_mass(diagram, 1, 0.5, 0.5) == 0  # below all births
    assert quadrant_mass(diagram, 0, 0.99, 1.0) == 0
    # infinite-death pairs are counted for any t
    assert quadrant_mass(diagram, 0, 1.0, 100.0) == 1


def test_quadrant_at_zero_counts_infinite_pairs():
    # at (0, T) with T past every finite death, only birth-0 infinite-death
    # pairs remain
    diagram = PersistenceDiagram(2, {0: [(0.0, INF), (0.0, 5.0), (1.0, INF)]})
    assert quadrant_mass(diagram, 0, 0.0, 10.0) == 1
    assert quadrant_mass(diagram, 0, 1.0, 10.0) == 2


def test_rectangle_mass_examples():
    diagram = compute_diagram(hollow_square_then_fill())
    assert rectangle_mass(diagram, 1, 0.5, 1.0, 1.5, 2.5) == 1
    assert rectangle_mass(diagram, 1, 1.0, 1.0, 1.5, 2.5) == 0  # empty box
    # box covering all finite pairs counts exactly those
    assert rectangle_mass(diagram, 1, 0.0, 1.0, 1.0, 10.0) == 1
    assert rectangle_mass(diagram, 0, 0.0, 1.0, 1.0, 10.0) == 0  # inf excluded


def test_rectangle_mass_ordering_errors():
    diagram = compute_diagram(hollow_square_then_fill())
    with pytest.raises(ValueError):
        rectangle_mass(diagram, 1, 1.0, 0.5, 1.5, 2.0)
    with pytest.raises(ValueError):
        rectangle_mass(diagram, 1, 0.0, 1.0, 2.0, 1.5)


def test_rectangle_equals_alternating_quadrants():
    for seed in range(15):
        f = random_filtration(2, 2, 9000 + seed)
        diagram = compute_diagram(f)
        for q in (0, 1):
            for s1, s2, t1, t2 in [(0.0, 0.3, 0.5, 0.8), (0.1, 0.5, 0.5, 1.0),
                                   (0.2, 0.4, 0.4, 0.6)]:
                alt = (quadrant_mass(diagram, q, s2, t1)
                       - quadrant_mass(diagram, q, s2, t2)
                       + quadrant_mass(diagram, q, s1, t2)
                       - quadrant_mass(diagram, q, s1, t1))
                assert rectangle_mass(diagram, q, s1, s2, t1, t2) == alt
                assert alt >= 0


# --- file format -------------------------------------------------------------------

def test_diagram_file_contents():
    f = hollow_square_then_fill()
    f.meta.update({"n": 2, "seed": 9})
    text = io.StringIO()
    write_diagram(compute_diagram(f), text)
    lines = text.getvalue().splitlines()
    assert lines[0] == "# 2 1 2 9"
    assert "0 1.0 inf" in lines
    assert "1 1.0 2.0" in lines


def test_diagram_file_round_trip_bytes():
    for seed in range(5):
        f = random_filtration(2, 2, 9500 + seed)
        diagram = compute_diagram(f)
        buf = io.StringIO()
        write_diagram(diagram, buf)
        reread = read_diagram(io.StringIO(buf.getvalue()))
        assert reread == diagram
        buf2 = io.StringIO()
        write_diagram(reread, buf2)
        assert buf2.getvalue() == buf.getvalue()


def test_empty_diagram_file_is_header_only():
    diagram = compute_diagram(Filtration(Window(1, 2), {}))
    buf = io.StringIO()
    write_diagram(diagram, buf)
    assert buf.getvalue() == "# 2 1 - -\n"


def test_parse_diagram_rejects_garbage():
    with pytest.raises(ValueError):
        parse_diagram("no header\n")
    with pytest.raises(ValueError):
        parse_diagram("# 2 1 - -\n0 2.0 1.0\n")  # birth >= death
