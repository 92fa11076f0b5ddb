"""Samplers for the four random cubical filtration models.

All samplers are pure functions of (spec, master seed, trial index): marks
and perturbations are drawn from counter-based streams keyed by absolute cube
or lattice-point coordinates, so the same cube receives the same mark in any
region that contains it.  Carving a sub-box out of a sampled window therefore
equals sampling that sub-box directly, which is what the block constructions
in the gap diagnostics rely on.

Model kinds and their dependence ranges R:

* upper  (R = 1): birth of Q = min mark over all cubes containing Q
* lower  (R = 0): birth of Q = max mark over all cubes contained in Q
* perturbed_lattice (R = 0): birth of Q = max distance between perturbed
  adjacent lattice points in Q (vertices are born at 0)
* ball_cover (R from the perturbation support): birth of Q = grid-approximate
  covering radius of Q by balls around perturbed lattice points; this model
  is approximate and flagged as such in its output metadata
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .cubes import (
    Box,
    ElementaryCube,
    Window,
    all_cubes_box,
    boundary_faces,
    cofaces_containing,
    faces_contained_in,
)
from .persistence import Filtration
from .rng import (
    TAG_CUBE_MARK,
    TAG_LATTICE_POINT,
    cube_key_array,
    point_key_array,
    stream_uniform,
)

INF = math.inf

MODEL_TAGS = {"upper": 1, "lower": 2, "perturbed_lattice": 3, "ball_cover": 4}


@dataclass(frozen=True)
class DistributionSpec:
    """One mark distribution: a family tag plus parameters.

    ``p_inf`` is the probability mass at infinity (the cube never appears);
    the remaining mass follows the family.  As a perturbation law the spec is
    applied independently per coordinate.
    """

    family: str
    params: tuple[float, ...] = ()
    p_inf: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_inf <= 1.0:
            raise ValueError("p_inf must lie in [0, 1]")
        if self.family == "point_mass":
            if len(self.params) != 1:
                raise ValueError("point_mass takes one parameter")
        elif self.family == "uniform":
            if len(self.params) != 2 or self.params[0] > self.params[1]:
                raise ValueError("uniform takes parameters (a, b) with a <= b")
        elif self.family == "exponential":
            if len(self.params) != 1 or self.params[0] <= 0:
                raise ValueError("exponential takes a positive rate")
        elif self.family == "empirical":
            vals, probs = self.values_and_probs()
            if len(vals) == 0 or len(vals) != len(probs):
                raise ValueError("empirical takes (v_1, c_1, ..., v_k, c_k)")
            if any(a >= b for a, b in zip(vals, vals[1:])):
                raise ValueError("empirical values must be strictly increasing")
            if any(a > b for a, b in zip(probs, probs[1:])) or probs[-1] > 1:
                raise ValueError("empirical cumulative probabilities must be "
                                 "nondecreasing and end at most 1")
        else:
            raise ValueError(f"unknown distribution family {self.family!r}")

    def values_and_probs(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        return self.params[0::2], self.params[1::2]

    def quantile(self, u: np.ndarray) -> np.ndarray:
        """Inverse CDF applied to uniforms in [0, 1); returns inf on the
        defect mass."""
        u = np.asarray(u, dtype=np.float64)
        out = np.empty_like(u)
        never = u >= 1.0 - self.p_inf if self.p_inf > 0 else np.zeros(u.shape, bool)
        v = u if self.p_inf == 0 else np.where(never, 0.0, u / (1.0 - self.p_inf))
        if self.family == "point_mass":
            out[...] = self.params[0]
        elif self.family == "uniform":
            a, b = self.params
            out[...] = a + (b - a) * v
        elif self.family == "exponential":
            out[...] = -np.log1p(-v) / self.params[0]
        else:
            # standard quantile function: smallest value whose cumulative
            # probability reaches u; mass beyond the table is the defect
            vals, probs = self.values_and_probs()
            idx = np.searchsorted(np.asarray(probs), v, side="left")
            padded = np.append(np.asarray(vals), INF)
            out[...] = padded[idx]
        out[never] = INF
        return out

    def coordinate_radius(self) -> float:
        """Supremum of |value| over the support; inf when unbounded."""
        if self.p_inf > 0:
            return INF
        if self.family == "point_mass":
            return abs(self.params[0])
        if self.family == "uniform":
            return max(abs(self.params[0]), abs(self.params[1]))
        if self.family == "exponential":
            return INF
        vals, _ = self.values_and_probs()
        return max(abs(v) for v in vals)


@dataclass(frozen=True)
class ModelSpec:
    """Which model to sample and with what parameters."""

    kind: str
    d: int
    marks: tuple[DistributionSpec, ...] = ()  # F_0..F_d for upper/lower
    perturbation: DistributionSpec | None = None  # per-coordinate law
    m_grid: int = 4  # ball_cover sample points per cube axis

    def __post_init__(self) -> None:
        if self.kind not in MODEL_TAGS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.d < 1:
            raise ValueError("d must be positive")
        if self.kind in ("upper", "lower"):
            if len(self.marks) != self.d + 1:
                raise ValueError(f"{self.kind} model needs d+1 mark distributions")
        else:
            if self.perturbation is None:
                raise ValueError(f"{self.kind} model needs a perturbation law")
            if self.perturbation.p_inf > 0:
                raise ValueError("perturbation law cannot have mass at infinity")
        if self.kind == "ball_cover":
            if self.m_grid < 2:
                raise ValueError("ball_cover needs m_grid >= 2 so cube corners "
                                 "are sampled")
            rho = self.perturbation.coordinate_radius()
            if not rho <= 0.5:
                raise ValueError("ball_cover requires a perturbation with "
                                 "coordinate support radius <= 1/2")

    @property
    def dependence_range(self) -> int:
        """R such that birth families over regions at max-norm distance > R
        are independent."""
        if self.kind == "upper":
            return 1
        if self.kind in ("lower", "perturbed_lattice"):
            return 0
        # ball_cover: births depend on perturbed points within the sampling
        # halo of ceil(rho)+1 lattice units on each side
        rho = self.perturbation.coordinate_radius()
        return 2 * (math.ceil(rho) + 1)

    @property
    def is_approximate(self) -> bool:
        return self.kind == "ball_cover"


def _mark_values(
    cubes: list[ElementaryCube],
    marks: tuple[DistributionSpec, ...],
    kind: str,
    seed: int,
    trial: int,
) -> dict[ElementaryCube, float]:
    """Independent marks u_Q ~ F_{dim Q}, one per cube."""
    u = stream_uniform(seed, (MODEL_TAGS[kind], TAG_CUBE_MARK, trial),
                       cube_key_array(cubes))
    dims = np.fromiter((c.dim for c in cubes), dtype=np.int64, count=len(cubes))
    values = np.empty(len(cubes), dtype=np.float64)
    for q in range(len(marks)):
        sel = dims == q
        if sel.any():
            values[sel] = marks[q].quantile(u[sel])
    return dict(zip(cubes, values.tolist()))


def _sample_upper_box(
    box: Box, marks: tuple[DistributionSpec, ...], seed: int, trial: int
) -> dict[ElementaryCube, float]:
    # marks are needed on every cube containing a box cube; all of those lie
    # in the box grown by one
    halo_cubes = all_cubes_box(box.grow(1))
    u = _mark_values(halo_cubes, marks, "upper", seed, trial)
    births: dict[ElementaryCube, float] = {}
    for cube in all_cubes_box(box):
        t = min(u[c] for c in cofaces_containing(cube))
        if t < INF:
            births[cube] = t
    return births


def _sample_lower_box(
    box: Box, marks: tuple[DistributionSpec, ...], seed: int, trial: int
) -> dict[ElementaryCube, float]:
    cubes = all_cubes_box(box)
    u = _mark_values(cubes, marks, "lower", seed, trial)
    births: dict[ElementaryCube, float] = {}
    for cube in cubes:
        t = max(u[c] for c in faces_contained_in(cube))
        if t < INF:
            births[cube] = t
    return births


def _perturbed_points(
    box: Box, law: DistributionSpec, kind: str, seed: int, trial: int
) -> tuple[np.ndarray, dict[tuple[int, ...], int]]:
    """Perturbed positions x_z = z + eps_z for every lattice point of the box."""
    ranges = [range(a, b + 1) for a, b in zip(box.lo, box.hi)]
    pts = np.array(list(itertools.product(*ranges)), dtype=np.int64)
    keys = point_key_array(pts)
    d = box.ambient_dim
    eps = np.empty((len(pts), d), dtype=np.float64)
    for axis in range(d):
        u = stream_uniform(seed, (MODEL_TAGS[kind], TAG_LATTICE_POINT, trial, axis),
                           keys)
        eps[:, axis] = law.quantile(u)
    index = {tuple(int(v) for v in z): i for i, z in enumerate(pts)}
    return pts + eps, index


def _sample_perturbed_box(
    box: Box, law: DistributionSpec, seed: int, trial: int
) -> dict[ElementaryCube, float]:
    x, index = _perturbed_points(box, law, "perturbed_lattice", seed, trial)
    births: dict[ElementaryCube, float] = {}
    for cube in all_cubes_box(box):
        q = cube.dim
        if q == 0:
            births[cube] = 0.0  # no adjacent pair: the inf is over nothing
            continue
        worst = 0.0
        for corner in cube.vertices():
            i = index[corner]
            for axis, e in enumerate(cube.extent):
                if e and corner[axis] == cube.base[axis]:
                    j = index[corner[:axis] + (corner[axis] + 1,) + corner[axis + 1:]]
                    dist = float(np.linalg.norm(x[i] - x[j]))
                    if dist > worst:
                        worst = dist
        births[cube] = worst
    return births


def covering_birth(cube: ElementaryCube, centers: np.ndarray, m_grid: int) -> float:
    """Grid approximation of the time at which balls around the centers cover
    the cube: the max over an m_grid^dim regular grid (corners included) of
    the distance to the nearest center."""
    steps = np.linspace(0.0, 1.0, m_grid)
    axes = [
        cube.base[a] + (steps if e else steps[:1])
        for a, e in enumerate(cube.extent)
    ]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    grid = grid.reshape(-1, cube.ambient_dim)
    dists, _ = cKDTree(centers).query(grid)
    return float(np.max(dists))


def _sample_ballcover_box(
    box: Box, law: DistributionSpec, m_grid: int, seed: int, trial: int
) -> dict[ElementaryCube, float]:
    rho = law.coordinate_radius()
    halo = math.ceil(rho) + 1
    x, _ = _perturbed_points(box.grow(halo), law, "ball_cover", seed, trial)
    tree = cKDTree(x)
    births: dict[ElementaryCube, float] = {}
    cubes = all_cubes_box(box)
    steps = np.linspace(0.0, 1.0, m_grid)
    for cube in cubes:
        axes = [
            cube.base[a] + (steps if e else steps[:1])
            for a, e in enumerate(cube.extent)
        ]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        grid = grid.reshape(-1, box.ambient_dim)
        dists, _ = tree.query(grid)
        births[cube] = float(np.max(dists))
    # monotone repair: propagate the max over faces upward; a no-op here
    # because the grid includes the cube corners, but kept as a guarantee
    for cube in sorted(cubes, key=lambda c: c.dim):
        if cube.dim == 0:
            continue
        worst = max(births[f.cube] for f in boundary_faces(cube))
        if births[cube] < worst:
            births[cube] = worst
    return births


def _meta(model_kind: str, n: int | None, seed: int, trial: int, approx: bool) -> dict:
    meta = {"model": model_kind, "seed": seed, "trial": trial}
    if n is not None:
        meta["n"] = n
    if approx:
        meta["approximate"] = True
    return meta


def sample_upper(
    n: int, marks: tuple[DistributionSpec, ...], seed: int, *, trial: int = 0
) -> Filtration:
    """Upper model on [-n, n]^d: births are the min mark over containing cubes.

    Marks are drawn on the grown box so every coface of a window cube is
    covered; the unrestricted birth is computed exactly, then windowed.
    """
    d = len(marks) - 1
    win = Window(n, d)
    births = _sample_upper_box(win.box, marks, seed, trial)
    return Filtration(win, births, _meta("upper", n, seed, trial, False))


def sample_lower(
    n: int, marks: tuple[DistributionSpec, ...], seed: int, *, trial: int = 0
) -> Filtration:
    """Lower model on [-n, n]^d: births are the max mark over contained cubes."""
    d = len(marks) - 1
    win = Window(n, d)
    births = _sample_lower_box(win.box, marks, seed, trial)
    return Filtration(win, births, _meta("lower", n, seed, trial, False))


def sample_perturbed_lattice(
    n: int, law: DistributionSpec, seed: int, *, d: int, trial: int = 0
) -> Filtration:
    """Perturbed-lattice model: birth of a cube is the largest distance
    between perturbed adjacent lattice points inside it."""
    win = Window(n, d)
    births = _sample_perturbed_box(win.box, law, seed, trial)
    return Filtration(win, births, _meta("perturbed_lattice", n, seed, trial, False))


def sample_ball_cover(
    n: int,
    law: DistributionSpec,
    m_grid: int,
    seed: int,
    *,
    d: int,
    trial: int = 0,
) -> Filtration:
    """Ball-cover model: birth of a cube is the grid-approximate radius at
    which balls around the perturbed lattice points cover it.

    The covering radius is maximized over an m_grid^dim regular grid per cube
    (corners included), a lower bound of the true value with one-sided error
    at most the grid cell diameter; outputs carry an "approximate" flag.
    """
    win = Window(n, d)
    births = _sample_ballcover_box(win.box, law, m_grid, seed, trial)
    return Filtration(win, births, _meta("ball_cover", n, seed, trial, True))


def sample(model: ModelSpec, n: int, seed: int, trial: int = 0) -> Filtration:
    """Dispatch to the model's sampler."""
    if model.kind == "upper":
        return sample_upper(n, model.marks, seed, trial=trial)
    if model.kind == "lower":
        return sample_lower(n, model.marks, seed, trial=trial)
    if model.kind == "perturbed_lattice":
        return sample_perturbed_lattice(n, model.perturbation, seed, d=model.d,
                                        trial=trial)
    return sample_ball_cover(n, model.perturbation, model.m_grid, seed,
                             d=model.d, trial=trial)


def restrict_box(filtration: Filtration, box: Box) -> Filtration:
    """Restrict a filtration to an arbitrary integer box (used for
    translated block windows)."""
    births = {c: t for c, t in filtration.births.items() if box.contains_cube(c)}
    return Filtration(box, births, filtration.meta)


def restrict(filtration: Filtration, m: int) -> Filtration:
    """Restrict a centered-window filtration to [-m, m]^d: births outside the
    smaller window become infinite."""
    d = filtration.d
    lo, hi = filtration.region.lo, filtration.region.hi
    if any(a != -b for a, b in zip(lo, hi)) or len(set(hi)) != 1:
        raise ValueError("restrict() applies to centered windows only")
    n = hi[0]
    if m > n:
        raise ValueError(f"cannot restrict window {n} to larger radius {m}")
    out = restrict_box(filtration, Window(m, d).box)
    out.meta["n"] = m
    return out


def sample_box(model: ModelSpec, box: Box, seed: int, trial: int = 0) -> Filtration:
    """Sample the model restricted to an arbitrary integer box (used for
    translated block windows)."""
    if model.kind == "upper":
        births = _sample_upper_box(box, model.marks, seed, trial)
    elif model.kind == "lower":
        births = _sample_lower_box(box, model.marks, seed, trial)
    elif model.kind == "perturbed_lattice":
        births = _sample_perturbed_box(box, model.perturbation, seed, trial)
    else:
        births = _sample_ballcover_box(box, model.perturbation, model.m_grid,
                                       seed, trial)
    return Filtration(box, births,
                      _meta(model.kind, None, seed, trial, model.is_approximate))


def block_window(k: int, r: int, z: tuple[int, ...]) -> Box:
    """The translated block 2kz + [-(k-r), k-r]^d."""
    base = Window(k - r, len(z)).box
    return base.translate(tuple(2 * k * zi for zi in z))


def block_copy(
    model: ModelSpec, k: int, r: int, z: tuple[int, ...], seed: int, trial: int = 0
) -> Filtration:
    """Sample the model on the translated block 2kz + [-(k-r), k-r]^d.

    Blocks at distinct z are separated by max-norm distance 2r, so they are
    independent when 2r exceeds the model's dependence range; by
    stationarity each block is distributed as the centered window of radius
    k - r.
    """
    if k <= r:
        raise ValueError("block construction requires k > r")
    if 2 * r <= model.dependence_range:
        raise ValueError(
            f"blocks not independent: 2r = {2 * r} <= R = {model.dependence_range}"
        )
    if len(z) != model.d:
        raise ValueError("block offset has wrong dimension")
    return sample_box(model, block_window(k, r, z), seed, trial)


FILTRATION_HEADER = "#"


def format_filtration(filtration: Filtration) -> str:
    """Dump format: header "# d n seed model", then "<canonical cube> <birth>"
    per finite-birth cube in canonical order."""
    lo, hi = filtration.region.lo, filtration.region.hi
    if any(a != -b for a, b in zip(lo, hi)) or len(set(hi)) > 1:
        raise ValueError("only centered-window filtrations have a dump form")
    n = hi[0]
    seed = filtration.meta.get("seed", "-")
    model = filtration.meta.get("model", "-")
    lines = [f"# {filtration.d} {n} {seed} {model}"]
    for cube in filtration.sorted_cubes():
        lines.append(f"{cube.canonical()} {repr(filtration.births[cube])}")
    return "\n".join(lines) + "\n"


def parse_filtration(text: str) -> Filtration:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith(FILTRATION_HEADER):
        raise ValueError("filtration file must start with a '# d n seed model' header")
    tokens = lines[0][1:].split()
    if len(tokens) != 4:
        raise ValueError(f"malformed filtration header: {lines[0]!r}")
    d, n = int(tokens[0]), int(tokens[1])
    meta: dict = {"n": n}
    if tokens[2] != "-":
        meta["seed"] = int(tokens[2])
    if tokens[3] != "-":
        meta["model"] = tokens[3]
    births = {}
    for ln in lines[1:]:
        cube_text, birth_text = ln.split()
        births[ElementaryCube.from_canonical(cube_text)] = float(birth_text)
    return Filtration(Window(n, d), births, meta)
