"""Elementary cubes, faces/cofaces, and window geometry on the integer grid.

An elementary cube in R^d is a product of d elementary intervals, each either
nondegenerate [l, l+1] or degenerate {l}.  We encode a cube as (base, extent):
``base[i]`` is the lower endpoint of the i-th interval and ``extent[i]`` is 1
for a nondegenerate interval, 0 for a degenerate one.  All operations here are
pure functions on immutable values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb


@dataclass(frozen=True, order=True)
class ElementaryCube:
    """A product of elementary intervals, encoded as lower corner + extent bits.

    Ordering is lexicographic on (base, extent); this is the canonical
    tie-break order used everywhere downstream.  Construction is deliberately
    unvalidated (cubes are built in bulk by the enumeration and face
    machinery); `from_canonical` validates external input.
    """

    base: tuple[int, ...]
    extent: tuple[int, ...]

    @property
    def ambient_dim(self) -> int:
        return len(self.base)

    @property
    def dim(self) -> int:
        return sum(self.extent)

    def canonical(self) -> str:
        """Textual form "d;base_1,...,base_d;extent bits" used in dumps."""
        bases = ",".join(str(b) for b in self.base)
        bits = "".join(str(e) for e in self.extent)
        return f"{self.ambient_dim};{bases};{bits}"

    @staticmethod
    def from_canonical(text: str) -> "ElementaryCube":
        d_str, bases, bits = text.split(";")
        cube = ElementaryCube(
            tuple(int(b) for b in bases.split(",")),
            tuple(int(c) for c in bits),
        )
        if cube.ambient_dim != int(d_str) or cube.ambient_dim == 0:
            raise ValueError(f"dimension mismatch in cube text {text!r}")
        if any(e not in (0, 1) for e in cube.extent):
            raise ValueError(f"extent bits must be 0/1 in cube text {text!r}")
        return cube

    def vertices(self) -> list[tuple[int, ...]]:
        """Lattice corner points of the cube (2^dim of them)."""
        axes = [(b, b + 1) if e else (b,) for b, e in zip(self.base, self.extent)]
        return list(itertools.product(*axes))


@dataclass(frozen=True)
class SignedCube:
    cube: ElementaryCube
    sign: int

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")


@dataclass(frozen=True)
class Box:
    """Axis-aligned integer box prod_i [lo_i, hi_i]; windows and block
    translates are both boxes."""

    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.lo) != len(self.hi):
            raise ValueError("lo and hi must have equal length")
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise ValueError("box must be nonempty")

    @property
    def ambient_dim(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> float:
        out = 1.0
        for a, b in zip(self.lo, self.hi):
            out *= b - a
        return out

    def translate(self, vec: tuple[int, ...]) -> "Box":
        return Box(
            tuple(a + v for a, v in zip(self.lo, vec)),
            tuple(b + v for b, v in zip(self.hi, vec)),
        )

    def grow(self, radius: int) -> "Box":
        return Box(
            tuple(a - radius for a in self.lo),
            tuple(b + radius for b in self.hi),
        )

    def contains_cube(self, cube: ElementaryCube) -> bool:
        return all(
            a <= b_i and b_i + e_i <= b
            for a, b, b_i, e_i in zip(self.lo, self.hi, cube.base, cube.extent)
        )

    def max_norm_gap(self, other: "Box") -> int:
        """d_max between the two boxes (0 if they intersect or touch)."""
        gap = 0
        for a1, b1, a2, b2 in zip(self.lo, self.hi, other.lo, other.hi):
            if a2 > b1:
                gap = max(gap, a2 - b1)
            elif a1 > b2:
                gap = max(gap, a1 - b2)
        return gap


@dataclass(frozen=True)
class Window:
    """The centered region [-n, n]^d; |window| = (2n)^d is the scaling volume
    for all densities."""

    n: int
    d: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("window radius must be nonnegative")
        if self.d < 1:
            raise ValueError("ambient dimension must be positive")

    @property
    def volume(self) -> float:
        return float(2 * self.n) ** self.d

    @property
    def box(self) -> Box:
        return Box((-self.n,) * self.d, (self.n,) * self.d)


def dimension(cube: ElementaryCube) -> int:
    """Number of nondegenerate intervals of the cube."""
    return cube.dim


@lru_cache(maxsize=262144)
def boundary_faces(cube: ElementaryCube) -> list[SignedCube]:
    """Signed codimension-1 faces of the cube.

    For the j-th nondegenerate axis (in increasing axis order) the face
    degenerated upward gets sign (-1)^(j-1) and the face degenerated downward
    the opposite sign.  Degenerate cubes have empty boundary.
    """
    faces: list[SignedCube] = []
    j = 0
    for axis, e in enumerate(cube.extent):
        if not e:
            continue
        sign = 1 if j % 2 == 0 else -1
        j += 1
        ext = cube.extent[:axis] + (0,) + cube.extent[axis + 1 :]
        up = cube.base[:axis] + (cube.base[axis] + 1,) + cube.base[axis + 1 :]
        faces.append(SignedCube(ElementaryCube(up, ext), sign))
        faces.append(SignedCube(ElementaryCube(cube.base, ext), -sign))
    return faces


@lru_cache(maxsize=262144)
def faces_contained_in(cube: ElementaryCube) -> list[ElementaryCube]:
    """All elementary cubes Q' with Q' contained in the cube (itself included);
    there are 3^dim of them."""
    choices = []
    for b, e in zip(cube.base, cube.extent):
        if e:
            choices.append(((b, 1), (b, 0), (b + 1, 0)))
        else:
            choices.append(((b, 0),))
    out = []
    for combo in itertools.product(*choices):
        base = tuple(c[0] for c in combo)
        extent = tuple(c[1] for c in combo)
        out.append(ElementaryCube(base, extent))
    return out


@lru_cache(maxsize=262144)
def cofaces_containing(cube: ElementaryCube) -> list[ElementaryCube]:
    """All elementary cubes Q' with Q' containing the cube (itself included).

    Each degenerate axis {l} may stay degenerate or extend to [l-1, l] or
    [l, l+1]; nondegenerate axes are forced.  Count is 3^(d - dim).
    """
    choices = []
    for b, e in zip(cube.base, cube.extent):
        if e:
            choices.append(((b, 1),))
        else:
            choices.append(((b, 0), (b - 1, 1), (b, 1)))
    out = []
    for combo in itertools.product(*choices):
        base = tuple(c[0] for c in combo)
        extent = tuple(c[1] for c in combo)
        out.append(ElementaryCube(base, extent))
    return out


def enumerate_cubes_box(box: Box, q: int) -> list[ElementaryCube]:
    """All elementary q-cubes contained in the box, in canonical order."""
    d = box.ambient_dim
    if q < 0 or q > d:
        raise ValueError(f"q={q} out of range for d={d}")
    out: list[ElementaryCube] = []
    base_ranges = [range(a, b + 1) for a, b in zip(box.lo, box.hi)]
    extents = [
        ext
        for ext in itertools.product((0, 1), repeat=d)
        if sum(ext) == q
    ]
    for base in itertools.product(*base_ranges):
        for ext in extents:
            if all(b + e <= hi for b, e, hi in zip(base, ext, box.hi)):
                out.append(ElementaryCube(base, ext))
    out.sort()
    return out


def enumerate_cubes(window: Window, q: int) -> list[ElementaryCube]:
    """All elementary q-cubes in [-n, n]^d, lexicographic (base, extent) order.

    The count is C(d,q) * (2n)^q * (2n+1)^(d-q).
    """
    return enumerate_cubes_box(window.box, q)


def all_cubes_box(box: Box) -> list[ElementaryCube]:
    """Every elementary cube of any dimension contained in the box, in
    canonical order."""
    d = box.ambient_dim
    out: list[ElementaryCube] = []
    for q in range(d + 1):
        out.extend(enumerate_cubes_box(box, q))
    out.sort()
    return out


def cube_count_formula(d: int, n: int, q: int) -> int:
    """Closed-form number of q-cubes in the window [-n, n]^d."""
    return comb(d, q) * (2 * n) ** q * (2 * n + 1) ** (d - q)


def cube_in_window(cube: ElementaryCube, window: Window) -> bool:
    """True iff every interval endpoint of the cube lies in [-n, n]."""
    return window.box.contains_cube(cube)
