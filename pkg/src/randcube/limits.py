"""Monte Carlo estimation of volume-scaled limit objects and exact gap
diagnostics.

Estimators draw independent trials of a model, compute persistent-Betti
tuples or diagram histograms per trial, and report volume-normalized
summaries.  All estimators are deterministic given (model, n, seed): trials
are keyed by index through the counter-based streams and reduced by an
ordered fold, so results are byte-identical regardless of worker count.

The gap diagnostics measure, on shared realizations, how far a big-window
statistic is from the sum over its independent translated blocks (near
additivity) and from its largest aligned sub-window (regularity), and compare
each sample against the corresponding deterministic bound
3^d sqrt(h) (1 - (1 - r/k)^d)  resp.  3^d sqrt(h) (1 - ((2m+1)k/n)^d).
A single measured > bound sample is a build-failing bug, not noise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np
from scipy.special import logsumexp

from .models import ModelSpec, block_window, restrict, restrict_box, sample
from .persistence import (
    PersistenceDiagram,
    compute_diagram,
    quadrant_mass,
)

INF = math.inf


# ---------------------------------------------------------------------------
# dyadic histogram
# ---------------------------------------------------------------------------

@dataclass
class Histogram:
    """Counts of diagram points over the fineness-l dyadic rectangle family.

    Rectangles are keyed by (i, j): the birth interval is [0, 1/2^(l+1)]
    (closed) for i = 1 and ((i-1)/2^(l+1), i/2^(l+1)] for i >= 2; the death
    interval is ((j-1)/2^(l+1), j/2^(l+1)].  Valid keys have
    2 <= i <= j <= l*2^(l+1) with j - i >= 2, or i = 1 with 3 <= j.
    Pairs outside every rectangle land in ``overflow``; infinite-death pairs
    are never binned and land in ``infinite``.
    """

    l: int
    counts: dict[tuple[int, int], float] = field(default_factory=dict)
    overflow: float = 0.0
    infinite: float = 0.0

    @property
    def denominator(self) -> int:
        return 2 ** (self.l + 1)

    def total_binned(self) -> float:
        return sum(self.counts.values())


def rectangle_keys(l: int) -> list[tuple[int, int]]:
    """All rectangle keys of fineness l in deterministic (i, j) order."""
    jmax = l * 2 ** (l + 1)
    keys = [(1, j) for j in range(3, jmax + 1)]
    for i in range(2, jmax + 1):
        for j in range(i + 2, jmax + 1):
            keys.append((i, j))
    keys.sort()
    return keys


def rectangle_bounds(l: int, i: int, j: int) -> tuple[float, float, float, float]:
    """(s_lo, s_hi, t_lo, t_hi) of rectangle (i, j); the birth interval is
    closed at s_lo only when i = 1."""
    den = 2 ** (l + 1)
    s_lo = 0.0 if i == 1 else (i - 1) / den
    return s_lo, i / den, (j - 1) / den, j / den


def rectangle_upper_right(l: int, i: int, j: int) -> tuple[float, float]:
    den = 2 ** (l + 1)
    return i / den, j / den


def bin_pair(l: int, birth: float, death: float) -> tuple[int, int] | None:
    """Rectangle key containing a finite pair, or None (overflow)."""
    den = 2 ** (l + 1)
    jmax = l * den
    j = math.ceil(death * den)  # death in ((j-1)/den, j/den]
    if j > jmax:
        return None
    if birth <= 1.0 / den:
        return (1, j) if j >= 3 else None
    i = math.ceil(birth * den)
    if 2 <= i <= j <= jmax and j - i >= 2:
        return (i, j)
    return None


def histogram(diagram: PersistenceDiagram, q: int, l: int) -> Histogram:
    """Bin the degree-q pairs of a diagram at fineness l."""
    if l < 1:
        raise ValueError("fineness l must be >= 1")
    hist = Histogram(l)
    counts = hist.counts
    for b, dth in diagram.degree(q):
        if dth == INF:
            hist.infinite += 1
            continue
        key = bin_pair(l, b, dth)
        if key is None:
            hist.overflow += 1
        else:
            counts[key] = counts.get(key, 0) + 1
    return hist


def piecewise_constant_integral(
    diagram: PersistenceDiagram, q: int, f, l: int
) -> tuple[float, float]:
    """Integral of f against the degree-q diagram, twice: the fineness-l
    piecewise-constant approximation sum_I f(UR(I)) * count(I), and the exact
    sum of f over the finite pairs.

    f is a function of (birth, death) with compact support away from the
    diagonal; infinite-death pairs contribute to neither value.
    """
    hist = histogram(diagram, q, l)
    approx = sum(
        f(*rectangle_upper_right(l, i, j)) * c for (i, j), c in sorted(hist.counts.items())
    )
    exact = sum(f(b, dth) for b, dth in diagram.degree(q) if dth < INF)
    return approx, exact


# ---------------------------------------------------------------------------
# per-trial workers (top level for pickling)
# ---------------------------------------------------------------------------

def _pb_trial(args) -> tuple[int, ...]:
    model, n, q, pairs, seed, trial = args
    diagram = compute_diagram(sample(model, n, seed, trial))
    return tuple(quadrant_mass(diagram, q, s, t) for s, t in pairs)


def _hist_trial(args):
    model, n, q, l, grid_pairs, seed, trial = args
    diagram = compute_diagram(sample(model, n, seed, trial))
    hist = histogram(diagram, q, l)
    masses = tuple(quadrant_mass(diagram, q, s, t) for s, t in grid_pairs)
    return hist.counts, hist.overflow, hist.infinite, masses


def _map_trials(worker, args_list, jobs: int) -> list:
    if jobs <= 1 or len(args_list) <= 1:
        return [worker(a) for a in args_list]
    with Pool(processes=jobs) as pool:
        return pool.map(worker, args_list)


# ---------------------------------------------------------------------------
# LLN estimators
# ---------------------------------------------------------------------------

@dataclass
class PBDensity:
    """Per-trial persistent-Betti quadrant masses and their volume-scaled
    summary statistics."""

    model: ModelSpec
    q: int
    pairs: tuple[tuple[float, float], ...]
    n: int
    trials: int
    seed: int
    masses: np.ndarray  # (trials, h) raw integer quadrant masses

    @property
    def volume(self) -> float:
        return float(2 * self.n) ** self.model.d

    @property
    def densities(self) -> np.ndarray:
        return self.masses / self.volume

    @property
    def mean(self) -> np.ndarray:
        return self.densities.mean(axis=0)

    @property
    def std(self) -> np.ndarray:
        if self.trials < 2:
            return np.zeros(len(self.pairs))
        return self.densities.std(axis=0, ddof=1)


def estimate_pb_density(
    model: ModelSpec,
    q: int,
    pairs,
    n: int,
    trials: int,
    seed: int,
    jobs: int = 1,
) -> PBDensity:
    """Sample `trials` filtrations and record the quadrant masses at each
    (s, t) pair, normalized by window volume in the summary."""
    pairs = tuple((float(s), float(t)) for s, t in pairs)
    for s, t in pairs:
        if not 0 <= s <= t < INF:
            raise ValueError(f"invalid pair (s, t) = ({s}, {t})")
    if not 0 <= q < model.d:
        raise ValueError(f"q={q} out of range for d={model.d}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if n < 1:
        raise ValueError("window radius must be >= 1 (volume normalization)")
    args = [(model, n, q, pairs, seed, trial) for trial in range(trials)]
    rows = _map_trials(_pb_trial, args, jobs)
    return PBDensity(model, q, pairs, n, trials, seed,
                     np.array(rows, dtype=np.int64).reshape(trials, len(pairs)))


def dyadic_grid_pairs(l: int) -> tuple[tuple[float, float], ...]:
    """All (s, t) with s <= t on the fineness-l dyadic corner grid."""
    den = 2 ** (l + 1)
    values = [k / den for k in range(l * den + 1)]
    return tuple((s, t) for s in values for t in values if s <= t)


@dataclass
class MeanDiagram:
    """Trial-averaged histogram of the diagram plus the per-trial quadrant
    field on the dyadic corner grid (for cross-checks against the
    persistent-Betti estimator)."""

    model: ModelSpec
    q: int
    n: int
    trials: int
    l: int
    seed: int
    mean_counts: dict[tuple[int, int], float]
    mean_overflow: float
    mean_infinite: float
    grid_pairs: tuple[tuple[float, float], ...]
    quadrant_masses: np.ndarray  # (trials, len(grid_pairs)) raw integers

    @property
    def volume(self) -> float:
        return float(2 * self.n) ** self.model.d

    def normalized(self) -> dict[tuple[int, int], float]:
        vol = self.volume
        return {key: c / vol for key, c in self.mean_counts.items()}


def estimate_mean_diagram(
    model: ModelSpec,
    q: int,
    n: int,
    trials: int,
    l: int,
    seed: int,
    jobs: int = 1,
) -> MeanDiagram:
    """Average the fineness-l histogram over trials; the per-trial quadrant
    field on the dyadic grid is reported alongside, and every rectangle count
    is re-checked per trial against its alternating quadrant sum."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if n < 1:
        raise ValueError("window radius must be >= 1 (volume normalization)")
    grid_pairs = dyadic_grid_pairs(l)
    args = [(model, n, q, l, grid_pairs, seed, trial) for trial in range(trials)]
    rows = _map_trials(_hist_trial, args, jobs)

    pair_index = {p: i for i, p in enumerate(grid_pairs)}
    mean_counts: dict[tuple[int, int], float] = {}
    overflow = 0.0
    infinite = 0.0
    masses = np.zeros((trials, len(grid_pairs)), dtype=np.int64)
    for trial, (counts, ovf, inf_ct, mrow) in enumerate(rows):
        masses[trial] = mrow
        overflow += ovf
        infinite += inf_ct
        for key, c in counts.items():
            mean_counts[key] = mean_counts.get(key, 0.0) + c
            i, j = key
            s_lo, s_hi, t_lo, t_hi = rectangle_bounds(l, i, j)
            # inclusion-exclusion identity, exact per trial
            expect = mrow[pair_index[(s_hi, t_lo)]] - mrow[pair_index[(s_hi, t_hi)]]
            if i > 1:
                expect += (mrow[pair_index[(s_lo, t_hi)]]
                           - mrow[pair_index[(s_lo, t_lo)]])
            if expect != c:
                raise AssertionError(
                    f"histogram/quadrant identity failed at trial {trial}, "
                    f"rectangle {key}: count {c} vs alternating sum {expect}"
                )
    mean_counts = {k: v / trials for k, v in sorted(mean_counts.items())}
    return MeanDiagram(model, q, n, trials, l, seed, mean_counts,
                       overflow / trials, infinite / trials, grid_pairs, masses)


def lln_sweep(
    model: ModelSpec,
    q: int,
    pairs=None,
    n_list=(),
    trials: int = 1,
    seed: int = 0,
    jobs: int = 1,
    l: int | None = None,
) -> list[dict]:
    """Convergence table across a window ladder.

    With ``pairs``: per (n, pair) the mean and sample standard deviation of
    the volume-scaled quadrant mass.  With a fineness ``l`` instead: per n
    the volume-scaled mean histogram and its L1 distance to the previous
    rung's (drift of the discretized mean diagram).
    """
    n_list = list(n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing")
    if (pairs is None) == (l is None):
        raise ValueError("pass exactly one of pairs or fineness l")
    rows = []
    if pairs is not None:
        for n in n_list:
            est = estimate_pb_density(model, q, pairs, n, trials, seed, jobs)
            for idx, (s, t) in enumerate(est.pairs):
                rows.append({
                    "n": n,
                    "s": s,
                    "t": t,
                    "mean": float(est.mean[idx]),
                    "std": float(est.std[idx]),
                })
        return rows
    prev: dict[tuple[int, int], float] | None = None
    for n in n_list:
        result = estimate_mean_diagram(model, q, n, trials, l, seed, jobs)
        normalized = result.normalized()
        row = {
            "n": n,
            "binned_density": sum(normalized.values()),
            "infinite_density": result.mean_infinite / result.volume,
        }
        if prev is not None:
            keys = set(prev) | set(normalized)
            row["hist_distance_prev"] = sum(
                abs(normalized.get(k, 0.0) - prev.get(k, 0.0)) for k in sorted(keys)
            )
        rows.append(row)
        prev = normalized
    return rows


# ---------------------------------------------------------------------------
# LDP estimators: empirical log-MGF and its convex conjugate
# ---------------------------------------------------------------------------

@dataclass
class GridFunction:
    """Values of a function on a finite axis-aligned grid in R^h."""

    axes: tuple[np.ndarray, ...]
    values: np.ndarray  # shape = tuple(len(a) for a in axes)
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.axes = tuple(np.asarray(a, dtype=np.float64) for a in self.axes)
        if not self.axes or any(len(a) == 0 for a in self.axes):
            raise ValueError("grid must be nonempty")
        for a in self.axes:
            if np.any(np.diff(a) <= 0):
                raise ValueError("grid axes must be strictly increasing")
        self.values = np.asarray(self.values, dtype=np.float64).reshape(
            tuple(len(a) for a in self.axes)
        )

    @property
    def h(self) -> int:
        return len(self.axes)

    def points(self) -> np.ndarray:
        """(P, h) array of grid points in row-major order."""
        grids = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([g.reshape(-1) for g in grids], axis=-1)

    def flat_values(self) -> np.ndarray:
        return self.values.reshape(-1)


def estimate_log_mgf(
    model: ModelSpec,
    q: int,
    pairs,
    lambda_axes,
    n: int,
    trials: int,
    seed: int,
    jobs: int = 1,
) -> GridFunction:
    """Empirical volume-scaled log-moment-generating function of the
    persistent-Betti tuple on a lambda grid.

    One common set of trials serves every lambda, which makes the estimate
    exactly convex (up to float error) and ties its value at 0 to exactly 0;
    each value is a stable log-sum-exp, so overflow cannot occur.
    """
    if trials < 2:
        raise ValueError("log-MGF estimation needs trials >= 2")
    pairs = tuple((float(s), float(t)) for s, t in pairs)
    axes = tuple(np.asarray(a, dtype=np.float64) for a in lambda_axes)
    if len(axes) != len(pairs):
        raise ValueError("need one lambda axis per (s, t) pair")
    est = estimate_pb_density(model, q, pairs, n, trials, seed, jobs)
    betas = est.masses.astype(np.float64)  # (T, h)
    grid = GridFunction(axes, np.zeros(tuple(len(a) for a in axes)))
    lam = grid.points()  # (P, h)
    dots = betas @ lam.T  # (T, P)
    phi = (logsumexp(dots, axis=0) - math.log(trials)) / est.volume
    meta = {"model": model.kind, "n": n, "trials": trials, "seed": seed,
            "q": q, "pairs": pairs, "kind": "log_mgf"}
    return GridFunction(axes, phi.reshape(grid.values.shape), meta)


def legendre_transform(phi: GridFunction, x_axes) -> GridFunction:
    """Convex conjugate of a grid function: for each x, the maximum of
    <lambda, x> - phi(lambda) over the lambda grid.

    A grid supremum is a pointwise lower bound of the true conjugate; when
    the lambda grid contains 0 and phi(0) = 0, the output is nonnegative by
    construction.
    """
    x_axes = tuple(np.asarray(a, dtype=np.float64) for a in x_axes)
    if len(x_axes) != phi.h:
        raise ValueError("x grid dimension must match the lambda grid")
    lam = phi.points()  # (P, h)
    vals = phi.flat_values()  # (P,)
    out = GridFunction(x_axes, np.zeros(tuple(len(a) for a in x_axes)))
    x = out.points()  # (Q, h)
    conj = np.max(x @ lam.T - vals[None, :], axis=1)
    meta = dict(phi.meta)
    meta["kind"] = "rate_function"
    return GridFunction(x_axes, conj.reshape(out.values.shape), meta)


# ---------------------------------------------------------------------------
# gap diagnostics
# ---------------------------------------------------------------------------

@dataclass
class GapReport:
    """One sample of a closed-form gap inequality."""

    kind: str  # "near_additivity" or "regularity"
    d: int
    q: int
    h: int
    k: int
    r: int
    m: int
    n: int  # big-window radius
    seed: int
    trial: int
    measured: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.measured <= self.bound


def _tuple_masses(filtration, q: int, pairs) -> np.ndarray:
    diagram = compute_diagram(filtration)
    return np.array([quadrant_mass(diagram, q, s, t) for s, t in pairs],
                    dtype=np.int64)


def near_additivity_gap(
    model: ModelSpec,
    q: int,
    pairs,
    k: int,
    r: int,
    m: int,
    seed: int,
    trial: int = 0,
) -> GapReport:
    """Gap between the big-window statistic on [-(2m+1)k, (2m+1)k]^d and the
    sum over its (2m+1)^d translated blocks carved from the same realization,
    against the bound 3^d sqrt(h) (1 - (1 - r/k)^d)."""
    pairs = tuple((float(s), float(t)) for s, t in pairs)
    if k <= r or r < 0:
        raise ValueError("block construction requires 0 <= r < k")
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m >= 1 and 2 * r <= model.dependence_range:
        # with a single block (m = 0) no independence between blocks is used
        raise ValueError(
            f"blocks not independent: 2r = {2 * r} <= R = {model.dependence_range}"
        )
    big_n = (2 * m + 1) * k
    big = sample(model, big_n, seed, trial)
    s_big = _tuple_masses(big, q, pairs)
    s_blocks = np.zeros(len(pairs), dtype=np.int64)
    for z in itertools.product(range(-m, m + 1), repeat=model.d):
        block = restrict_box(big, block_window(k, r, z))
        s_blocks += _tuple_masses(block, q, pairs)
    volume = float(2 * big_n) ** model.d
    measured = float(np.linalg.norm(s_big - s_blocks)) / volume
    h = len(pairs)
    bound = 3 ** model.d * math.sqrt(h) * (1.0 - (1.0 - r / k) ** model.d)
    return GapReport("near_additivity", model.d, q, h, k, r, m, big_n,
                     seed, trial, measured, bound)


def regularity_gap(
    model: ModelSpec,
    q: int,
    pairs,
    k: int,
    n: int,
    seed: int,
    trial: int = 0,
) -> GapReport:
    """Gap between the window-n statistic and its largest aligned sub-window
    of radius (2m+1)k on the same realization, against the bound
    3^d sqrt(h) (1 - ((2m+1)k/n)^d)."""
    pairs = tuple((float(s), float(t)) for s, t in pairs)
    if not 1 <= k <= n:
        raise ValueError("regularity requires 1 <= k <= n")
    m_n = (n - k) // (2 * k)  # unique m with (2m+1)k <= n < (2m+3)k
    sub_n = (2 * m_n + 1) * k
    big = sample(model, n, seed, trial)
    s_n = _tuple_masses(big, q, pairs)
    s_sub = _tuple_masses(restrict(big, sub_n), q, pairs)
    volume = float(2 * n) ** model.d
    measured = float(np.linalg.norm(s_n - s_sub)) / volume
    h = len(pairs)
    bound = 3 ** model.d * math.sqrt(h) * (1.0 - (sub_n / n) ** model.d)
    return GapReport("regularity", model.d, q, h, k, 0, m_n, n,
                     seed, trial, measured, bound)


# ---------------------------------------------------------------------------
# CSV output (headers mandatory, deterministic row order, repr floats)
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(fp, header: list[str], rows) -> None:
    fp.write(",".join(header) + "\n")
    for row in rows:
        fp.write(",".join(_fmt(v) for v in row) + "\n")


def write_pb_csv(fp, est: PBDensity) -> None:
    header = ["model", "q", "s", "t", "n", "trial", "value"]
    rows = []
    for idx, (s, t) in enumerate(est.pairs):
        for trial in range(est.trials):
            rows.append((est.model.kind, est.q, s, t, est.n, trial,
                         float(est.densities[trial, idx])))
    _write_csv(fp, header, rows)


def write_histogram_csv(fp, result: MeanDiagram) -> None:
    header = ["l", "i", "j", "count", "normalized"]
    vol = result.volume
    rows = [
        (result.l, i, j, c, c / vol)
        for (i, j), c in sorted(result.mean_counts.items())
    ]
    _write_csv(fp, header, rows)


def write_mgf_csv(fp, phi: GridFunction) -> None:
    header = [f"lambda_{i + 1}" for i in range(phi.h)] + ["phi_hat", "n", "trials"]
    n = phi.meta.get("n", "-")
    trials = phi.meta.get("trials", "-")
    rows = [
        tuple(pt) + (val, n, trials)
        for pt, val in zip(phi.points(), phi.flat_values())
    ]
    _write_csv(fp, header, rows)


def write_rate_csv(fp, rate: GridFunction) -> None:
    header = [f"x_{i + 1}" for i in range(rate.h)] + ["phi_star"]
    rows = [
        tuple(pt) + (val,)
        for pt, val in zip(rate.points(), rate.flat_values())
    ]
    _write_csv(fp, header, rows)


def write_gap_csv(fp, reports: list[GapReport]) -> None:
    header = ["kind", "k", "r", "m", "n", "h", "measured", "bound", "pass"]
    rows = [
        (g.kind, g.k, g.r, g.m, g.n, g.h, g.measured, g.bound, g.passed)
        for g in reports
    ]
    _write_csv(fp, header, rows)
