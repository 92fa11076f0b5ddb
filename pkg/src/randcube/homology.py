"""Exact linear algebra over a field: boundary matrices, ranks, Betti numbers.

Homology is computed over GF(p) with p = 2^31 - 1 by default.  Betti numbers
over a prime field match the real-coefficient ones unless the complex has
p-torsion, which cannot occur at the sizes handled here; an exact-rational
mode is provided for cross-checks on small instances.  GF(2) is available as
an explicitly requested fast mode only (2-torsion may diverge from the
real-coefficient answer for d >= 4).

Matrices are stored column-major as dicts {row_index: coefficient}; the
elimination engine (pivot = lowest nonzero entry of a column, i.e. the largest
row index) is shared with the persistence reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .cubes import ElementaryCube, boundary_faces

DEFAULT_PRIME = 2147483647

Column = dict[int, int]


class PrimeField:
    """Arithmetic in GF(p) on plain ints in [0, p)."""

    __slots__ = ("p",)

    def __init__(self, p: int = DEFAULT_PRIME):
        if p < 2:
            raise ValueError("field characteristic must be a prime >= 2")
        self.p = p

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def from_signed(self, value: int) -> int:
        return value % self.p

    def inv(self, value: int):
        return pow(value, -1, self.p)

    def submul_into(self, dst: Column, src: Column, factor: int) -> None:
        """dst -= factor * src, dropping entries that cancel."""
        p = self.p
        get = dst.get
        for row, v in src.items():
            nv = (get(row, 0) - factor * v) % p
            if nv:
                dst[row] = nv
            elif row in dst:
                del dst[row]

    def scale_into(self, col: Column, factor: int) -> None:
        p = self.p
        for row in col:
            col[row] = col[row] * factor % p


class RationalField:
    """Exact rational arithmetic; the cross-check mode for small instances."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "RationalField()"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RationalField)

    def from_signed(self, value: int) -> Fraction:
        return Fraction(value)

    def inv(self, value: Fraction) -> Fraction:
        return 1 / value

    def submul_into(self, dst: Column, src: Column, factor) -> None:
        get = dst.get
        for row, v in src.items():
            nv = get(row, 0) - factor * v
            if nv:
                dst[row] = nv
            elif row in dst:
                del dst[row]

    def scale_into(self, col: Column, factor) -> None:
        for row in col:
            col[row] = col[row] * factor


GF = PrimeField
DEFAULT_FIELD = PrimeField(DEFAULT_PRIME)


def reduce_columns(
    columns: Iterable[Column],
    field=DEFAULT_FIELD,
    want_kernel: bool = False,
):
    """Column elimination with pivot at each column's largest row index.

    Returns (rank, pivot_rows, kernel) where pivot_rows maps pivot row ->
    input column index and kernel is a list of coordinate dicts {input column
    index: coefficient} spanning the kernel (only populated when
    ``want_kernel``).
    """
    pivot_of: dict[int, int] = {}
    stored_cols: list[Column] = []
    stored_combos: list[Column] = []
    pivot_rows: dict[int, int] = {}
    kernel: list[Column] = []
    one = field.from_signed(1)
    for j, col_in in enumerate(columns):
        col = dict(col_in)
        combo: Column = {j: one} if want_kernel else {}
        while col:
            low = max(col)
            hit = pivot_of.get(low)
            if hit is None:
                break
            factor = col[low]
            field.submul_into(col, stored_cols[hit], factor)
            if want_kernel:
                field.submul_into(combo, stored_combos[hit], factor)
        if col:
            low = max(col)
            inv = field.inv(col[low])
            field.scale_into(col, inv)
            if want_kernel:
                field.scale_into(combo, inv)
            pivot_of[low] = len(stored_cols)
            pivot_rows[low] = j
            stored_cols.append(col)
            stored_combos.append(combo)
        elif want_kernel:
            kernel.append(combo)
    return len(stored_cols), pivot_rows, kernel


@dataclass
class SparseMatrix:
    """Boundary-style matrix: rows/columns indexed by cubes, entries in the
    field, stored column-major with no explicit zeros."""

    row_cubes: list[ElementaryCube]
    col_cubes: list[ElementaryCube]
    columns: list[Column]
    field: PrimeField | RationalField

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_cubes), len(self.col_cubes)

    def dump_coo(self) -> str:
        """Debug dump in coordinate text form: one "row col value" per line."""
        lines = []
        for j, col in enumerate(self.columns):
            for i in sorted(col):
                lines.append(f"{i} {j} {col[i]}")
        return "\n".join(lines)


def boundary_matrix(
    cubes: list[ElementaryCube],
    q: int,
    field=DEFAULT_FIELD,
) -> SparseMatrix:
    """Matrix of the boundary map from q-chains to (q-1)-chains of a
    face-closed cube list, in canonical cube order.

    Raises ValueError("not face-closed ...") if some face of a q-cube is
    missing from the list.
    """
    if q < 1:
        raise ValueError("boundary matrix requires q >= 1")
    rows = sorted(c for c in cubes if c.dim == q - 1)
    cols = sorted(c for c in cubes if c.dim == q)
    row_index = {c: i for i, c in enumerate(rows)}
    columns: list[Column] = []
    for cube in cols:
        col: Column = {}
        for face in boundary_faces(cube):
            i = row_index.get(face.cube)
            if i is None:
                raise ValueError(
                    f"not face-closed: {face.cube.canonical()} missing "
                    f"(face of {cube.canonical()})"
                )
            col[i] = field.from_signed(face.sign)
        columns.append(col)
    return SparseMatrix(rows, cols, columns, field)


def rank(matrix: SparseMatrix) -> int:
    """Exact rank over the matrix's field."""
    r, _, _ = reduce_columns(matrix.columns, matrix.field)
    return r


def kernel_basis(matrix: SparseMatrix) -> list[Column]:
    """Basis of the kernel, as coordinate dicts over the matrix's columns."""
    _, _, kernel = reduce_columns(matrix.columns, matrix.field, want_kernel=True)
    return kernel


def betti(cubes: list[ElementaryCube], q: int, field=DEFAULT_FIELD) -> int:
    """Exact q-th Betti number of a face-closed cube list.

    dim ker of the q-th boundary map minus rank of the (q+1)-th one.
    """
    if not cubes:
        return 0
    d = cubes[0].ambient_dim
    if q < 0 or q > d:
        raise ValueError(f"q={q} out of range for d={d}")
    n_q = sum(1 for c in cubes if c.dim == q)
    rank_q = 0 if q == 0 else rank(boundary_matrix(cubes, q, field))
    rank_q1 = 0 if q == d else rank(boundary_matrix(cubes, q + 1, field))
    return n_q - rank_q - rank_q1
