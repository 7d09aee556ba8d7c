"""Field sweeps, crossing detection/classification, feature clustering, and
temperature continuation of feature centers.

The diagnostic follows the projection method: eigenstates are ordered by
energy after a global positivity shift, and the probe m_S = 0 weights p_i are
tracked across the grid. Sudden p exchanges between adjacent levels, or local
minima of the adjacent-level gap, mark (avoided) crossings; each candidate is
refined by a bracketed one-dimensional gap minimization and classified as a
true crossing (gap below threshold at 0.01 G resolution) or an avoided one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .hamiltonian import hamiltonian_terms, probe_projector_vector
from .kernels import batched_eigh_project
from .thermal import ThermalZfsModel

__all__ = [
    "SweepConfig",
    "SweepResult",
    "CrossingEvent",
    "CrossingFeature",
    "sweep",
    "detect_events",
    "refine_and_classify",
    "cluster_features",
    "temperature_shift",
    "find_features",
    "TemperatureShift",
]

# Keep chunked Hamiltonian batches around this many float64 entries (~256 MB).
_CHUNK_BUDGET = 32_000_000

# Full eigenvector retention only below this dimension.
_VECTOR_RETENTION_DIM = 128


@dataclass(frozen=True)
class SweepConfig:
    """Detection and refinement thresholds (all configurable)."""

    jump_threshold: float = 0.4     # adjacent-point p jump marking an event
    exchange_threshold: float = 0.25  # windowed p exchange for gap-minimum relevance
    gap_ceiling: float = 30.0       # MHz, ignore gap minima above this
    gap_true: float = 0.05          # MHz, true-vs-avoided threshold
    field_resolution: float = 0.01  # G, refinement resolution
    cluster_radius: float = 15.0    # G, single-linkage clustering radius


@dataclass
class SweepResult:
    field: np.ndarray         # (n,) gauss, ascending
    eigenvalues: np.ndarray   # (n, d) MHz, ascending per point, shift applied
    projections: np.ndarray   # (n, d) probe m_S = 0 weights
    shift_applied: float      # MHz added to the diagonal
    temperature: float
    d_zfs: float
    eigenvectors: np.ndarray | None = None

    @property
    def dimension(self) -> int:
        return self.eigenvalues.shape[1]

    def gaps(self) -> np.ndarray:
        """Adjacent-level gaps, shape (n, d-1)."""
        return np.diff(self.eigenvalues, axis=1)

    def to_csv(self, fh) -> None:
        d = self.dimension
        cols = [f"eps_{i}" for i in range(d)] + [f"p_{i}" for i in range(d)]
        fh.write("B_gauss," + ",".join(cols) + "\n")
        for k in range(len(self.field)):
            row = [f"{self.field[k]:.2f}"]
            row += [f"{x:.4f}" for x in self.eigenvalues[k]]
            row += [f"{x:.6f}" for x in self.projections[k]]
            fh.write(",".join(row) + "\n")


@dataclass(frozen=True)
class CrossingEvent:
    field: float              # gauss, refined center (gap argmin)
    levels: tuple             # (i, i+1) adjacent pair after ordering
    min_gap: float            # MHz
    kind: str                 # "true" | "avoided"
    projection_jump: float    # p exchange across the event
    bracket: tuple = (0.0, 0.0)


@dataclass(frozen=True)
class CrossingFeature:
    center: float             # gauss
    lines: tuple              # CrossingEvents, ascending in field
    span: tuple               # (lo, hi) gauss

    @property
    def min_gap(self) -> float:
        return min(ln.min_gap for ln in self.lines)

    @property
    def kind(self) -> str:
        return _central_line(self).kind

    def to_dict(self) -> dict:
        return {
            "center_G": round(self.center, 2),
            "span_G": [round(self.span[0], 2), round(self.span[1], 2)],
            "kind": self.kind,
            "min_gap_MHz": round(self.min_gap, 4),
            "lines": [
                {
                    "field_G": round(ln.field, 2),
                    "levels": list(ln.levels),
                    "min_gap_MHz": round(ln.min_gap, 4),
                    "kind": ln.kind,
                    "projection_jump": round(ln.projection_jump, 4),
                }
                for ln in self.lines
            ],
        }


def _central_line(feature: CrossingFeature) -> CrossingEvent:
    fields = np.array([ln.field for ln in feature.lines])
    return feature.lines[int(np.argmin(np.abs(fields - feature.center)))]


class _Solver:
    """Single-field eigenvalue/projection evaluations for one (spec, D)."""

    def __init__(self, spec, d_zfs: float):
        h_const, h_d, h_b = hamiltonian_terms(spec)
        h0 = h_const + d_zfs * h_d
        if np.abs(h0.imag).max() < 1e-12 and np.abs(h_b.imag).max() < 1e-12:
            h0, h_b = h0.real, h_b.real
        self.h0 = np.ascontiguousarray(h0)
        self.h_b = np.ascontiguousarray(h_b)
        self.v0, self.d_pre, self.d_post = probe_projector_vector(spec)
        self.dim = h0.shape[0]

    def batch(self, fields: np.ndarray, keep_vectors: bool = False):
        hams = self.h0[None, :, :] + fields[:, None, None] * self.h_b[None, :, :]
        return batched_eigh_project(hams, self.v0, self.d_pre, self.d_post, keep_vectors)

    def eigvals(self, b: float) -> np.ndarray:
        return np.linalg.eigvalsh(self.h0 + b * self.h_b)

    def gap(self, b: float, pair: int) -> float:
        w = self.eigvals(b)
        return float(w[pair + 1] - w[pair])

    def projections(self, b: float) -> np.ndarray:
        vals, projs, _ = self.batch(np.array([b]))
        return projs[0]


def sweep(
    spec,
    b_min: float,
    b_max: float,
    n_points: int = 2048,
    temperature: float = 300.0,
    model: ThermalZfsModel | None = None,
    keep_vectors: str | bool = "auto",
) -> SweepResult:
    """Diagonalize over an ascending field grid and track projections."""
    if not b_min < b_max:
        raise ValueError("require b_min < b_max")
    if n_points < 2:
        raise ValueError("need at least 2 grid points")
    model = model or ThermalZfsModel()
    d_zfs = model.zfs_at(temperature)
    solver = _Solver(spec, d_zfs)

    grid = np.linspace(b_min, b_max, n_points)
    # Coarse pre-scan fixes the positivity shift for the whole sweep.
    pre = np.linspace(b_min, b_max, min(9, n_points))
    low = min(solver.eigvals(b)[0] for b in pre)
    shift = abs(min(low, 0.0)) + 100.0

    if keep_vectors == "auto":
        keep_vectors = solver.dim < _VECTOR_RETENTION_DIM

    chunk = max(1, _CHUNK_BUDGET // (solver.dim * solver.dim))
    vals_out = np.empty((n_points, solver.dim))
    projs_out = np.empty((n_points, solver.dim))
    vecs_out = (
        np.empty((n_points, solver.dim, solver.dim), dtype=solver.h0.dtype)
        if keep_vectors
        else None
    )
    for start in range(0, n_points, chunk):
        sl = slice(start, min(start + chunk, n_points))
        vals, projs, vecs = solver.batch(grid[sl], keep_vectors=bool(keep_vectors))
        vals_out[sl] = vals + shift
        projs_out[sl] = projs
        if keep_vectors:
            vecs_out[sl] = vecs

    return SweepResult(
        field=grid,
        eigenvalues=vals_out,
        projections=projs_out,
        shift_applied=shift,
        temperature=temperature,
        d_zfs=d_zfs,
        eigenvectors=vecs_out,
    )


@dataclass(frozen=True)
class CandidateEvent:
    pair: int
    b_lo: float
    b_hi: float
    grid_index: int
    projection_jump: float


def _exchange(projs: np.ndarray, gaps: np.ndarray, pair: int, k: int) -> float:
    """p exchange of the pair across grid index k, window widened until the
    gap has reopened (or a hard cap), so broad avoided crossings register."""
    n = projs.shape[0]
    g0 = gaps[k, pair]
    w = 2
    w_cap = max(5, n // 40)
    while w < w_cap:
        lo, hi = max(k - w, 0), min(k + w, n - 1)
        if gaps[lo, pair] > max(3.0 * g0, g0 + 1.0) and gaps[hi, pair] > max(3.0 * g0, g0 + 1.0):
            break
        w += 1
    lo, hi = max(k - w, 0), min(k + w, n - 1)
    return max(
        abs(projs[hi, pair] - projs[lo, pair]),
        abs(projs[hi, pair + 1] - projs[lo, pair + 1]),
    )


def detect_events(sr: SweepResult, config: SweepConfig | None = None) -> list[CandidateEvent]:
    """Unrefined crossing candidates with bracketing field intervals."""
    config = config or SweepConfig()
    gaps = sr.gaps()
    projs = sr.projections
    n, npairs = gaps.shape
    candidates: dict[tuple, CandidateEvent] = {}

    # Gap local minima below the scan ceiling, filtered by p relevance.
    # Boundary points count as minima so features at the grid edge (e.g. the
    # zero-field crossing) are still bracketed.
    for pair in range(npairs):
        g = gaps[:, pair]
        minima = list(np.where((g[1:-1] <= g[:-2]) & (g[1:-1] <= g[2:]) & (g[1:-1] < config.gap_ceiling))[0] + 1)
        if g[0] <= g[1] and g[0] < config.gap_ceiling:
            minima.append(0)
        if g[-1] <= g[-2] and g[-1] < config.gap_ceiling:
            minima.append(n - 1)
        for k in minima:
            ex = _exchange(projs, gaps, pair, int(k))
            if ex < config.exchange_threshold:
                continue
            key = (pair, int(k) // 3)
            cand = CandidateEvent(
                pair=pair,
                b_lo=float(sr.field[max(k - 1, 0)]),
                b_hi=float(sr.field[min(k + 1, n - 1)]),
                grid_index=int(k),
                projection_jump=float(ex),
            )
            if key not in candidates or candidates[key].projection_jump < ex:
                candidates[key] = cand

    # Direct p-jumps between adjacent grid points (true crossings can slip
    # between grid points without a resolved gap minimum).
    dp = np.abs(np.diff(projs, axis=0))
    for k, i in zip(*np.where(dp > config.jump_threshold)):
        for pair in (i - 1, i):
            if not 0 <= pair < npairs:
                continue
            km = int(np.argmin(gaps[max(k - 1, 0) : k + 2, pair])) + max(k - 1, 0)
            if gaps[km, pair] >= config.gap_ceiling:
                continue
            key = (int(pair), km // 3)
            if key in candidates:
                continue
            ex = _exchange(projs, gaps, int(pair), km)
            if ex < config.exchange_threshold:
                continue
            candidates[key] = CandidateEvent(
                pair=int(pair),
                b_lo=float(sr.field[max(km - 1, 0)]),
                b_hi=float(sr.field[min(km + 1, n - 1)]),
                grid_index=km,
                projection_jump=float(ex),
            )

    out = sorted(candidates.values(), key=lambda e: (e.b_lo, e.pair))
    return out


def _minimize_gap(solver: _Solver, pair: int, b_lo: float, b_hi: float, xatol: float) -> tuple[float, float]:
    res = minimize_scalar(
        lambda b: solver.gap(b, pair),
        bounds=(b_lo, b_hi),
        method="bounded",
        options={"xatol": xatol},
    )
    return float(res.x), float(res.fun)


def refine_and_classify(
    spec,
    event: CandidateEvent,
    temperature: float = 300.0,
    model: ThermalZfsModel | None = None,
    config: SweepConfig | None = None,
) -> list[CrossingEvent]:
    """Bracketed gap minimization to 0.01 G; classify true vs avoided.

    A non-unimodal bracket (several local minima of the same pair gap) is
    split and every minimum is reported.
    """
    config = config or SweepConfig()
    model = model or ThermalZfsModel()
    solver = _Solver(spec, model.zfs_at(temperature))
    return _refine_with_solver(solver, event, config)


def _refine_with_solver(solver: _Solver, event: CandidateEvent, config: SweepConfig) -> list[CrossingEvent]:
    b_lo, b_hi = event.b_lo, event.b_hi
    sample = np.linspace(b_lo, b_hi, 17)
    g = np.array([solver.gap(b, event.pair) for b in sample])
    interior = np.where((g[1:-1] <= g[:-2]) & (g[1:-1] <= g[2:]))[0] + 1
    if len(interior) == 0:
        interior = [int(np.argmin(g))]
    events = []
    for k in interior:
        lo = sample[max(k - 1, 0)]
        hi = sample[min(k + 1, len(sample) - 1)]
        center, gap = _minimize_gap(solver, event.pair, lo, hi, config.field_resolution)
        kind = "true" if gap < config.gap_true else "avoided"
        events.append(
            CrossingEvent(
                field=center,
                levels=(event.pair, event.pair + 1),
                min_gap=gap,
                kind=kind,
                projection_jump=event.projection_jump,
                bracket=(b_lo, b_hi),
            )
        )
    return events


def cluster_features(events: list[CrossingEvent], cluster_radius: float = 15.0) -> list[CrossingFeature]:
    """Single-linkage clustering of refined events along the field axis.

    Feature center is the median of the member line fields.
    """
    if not events:
        return []
    events = sorted(events, key=lambda e: e.field)
    groups: list[list[CrossingEvent]] = [[events[0]]]
    for ev in events[1:]:
        if ev.field - groups[-1][-1].field <= cluster_radius:
            groups[-1].append(ev)
        else:
            groups.append([ev])
    features = []
    for grp in groups:
        fields = [e.field for e in grp]
        features.append(
            CrossingFeature(
                center=float(np.median(fields)),
                lines=tuple(grp),
                span=(min(fields), max(fields)),
            )
        )
    return features


def find_features(
    spec,
    b_min: float,
    b_max: float,
    n_points: int = 2048,
    temperature: float = 300.0,
    model: ThermalZfsModel | None = None,
    config: SweepConfig | None = None,
    refine: bool = True,
) -> list[CrossingFeature]:
    """Sweep, detect, refine, and cluster in one call.

    ``refine=False`` skips the per-candidate gap minimization and reports
    events at grid resolution; gaps and classifications are then grid-limited
    estimates, so use it only where the grid spacing already meets the needed
    field accuracy (e.g. broad-band centers of very large systems).
    """
    config = config or SweepConfig()
    model = model or ThermalZfsModel()
    sr = sweep(spec, b_min, b_max, n_points, temperature, model, keep_vectors=False)
    solver = _Solver(spec, sr.d_zfs)
    refined = []
    for cand in detect_events(sr, config):
        if refine:
            refined.extend(_refine_with_solver(solver, cand, config))
        else:
            gap = float(sr.gaps()[cand.grid_index, cand.pair])
            refined.append(
                CrossingEvent(
                    field=float(sr.field[cand.grid_index]),
                    levels=(cand.pair, cand.pair + 1),
                    min_gap=gap,
                    kind="true" if gap < config.gap_true else "avoided",
                    projection_jump=cand.projection_jump,
                    bracket=(cand.b_lo, cand.b_hi),
                )
            )
    # Candidates from different level pairs can refine to the same field.
    unique: dict[tuple, CrossingEvent] = {}
    for ev in refined:
        key = (ev.levels, round(ev.field / max(config.field_resolution * 5, 0.05)))
        if key not in unique or ev.min_gap < unique[key].min_gap:
            unique[key] = ev
    return cluster_features(list(unique.values()), config.cluster_radius)


@dataclass
class TemperatureShift:
    temperatures: list
    centers: list             # refined feature-line center at each T, gauss
    delta_b: list             # center(T) - center(T_ref), gauss
    slope_at_ref: float       # G/K, central difference at T_ref
    t_ref: float
    lost: list = field(default_factory=list)  # temperatures where tracking failed


def _track_center(
    solver: _Solver, pair: int, seed: float, window: float, resolution: float
) -> float | None:
    coarse = np.linspace(seed - window, seed + window, 21)
    coarse = coarse[coarse > 0]
    g = np.array([solver.gap(b, pair) for b in coarse])
    k = int(np.argmin(g))
    if k in (0, len(coarse) - 1):
        return None  # minimum ran off the search window: feature lost
    center, _ = _minimize_gap(solver, pair, coarse[k - 1], coarse[k + 1], resolution)
    return center


def temperature_shift(
    spec,
    feature: CrossingFeature,
    t_grid,
    model: ThermalZfsModel | None = None,
    config: SweepConfig | None = None,
    t_ref: float = 300.0,
    window: float = 5.0,
    track_field: float | None = None,
) -> TemperatureShift:
    """Continue a feature center in temperature and report shifts.

    The tracked line defaults to the feature's central line; `track_field`
    picks the member line nearest a physically motivated field instead.
    """
    config = config or SweepConfig()
    model = model or ThermalZfsModel()
    target = track_field if track_field is not None else feature.center
    fields = np.array([ln.field for ln in feature.lines])
    line = feature.lines[int(np.argmin(np.abs(fields - target)))]
    pair = line.levels[0]

    def center_at(t: float, seed: float) -> float | None:
        solver = _Solver(spec, model.zfs_at(t))
        return _track_center(solver, pair, seed, window, config.field_resolution)

    ref_center = center_at(t_ref, line.field)
    if ref_center is None:
        raise RuntimeError(f"feature near {line.field:.2f} G lost at reference temperature")

    temps = sorted(float(t) for t in t_grid)
    order = sorted(range(len(temps)), key=lambda i: abs(temps[i] - t_ref))
    centers: dict[int, float | None] = {}
    for rank, i in enumerate(order):
        # Seed from the nearest already-tracked temperature (continuation).
        done = [j for j in order[:rank] if centers.get(j) is not None]
        seed = centers[min(done, key=lambda j: abs(temps[j] - temps[i]))] if done else ref_center
        centers[i] = center_at(temps[i], seed)

    slope_lo = center_at(t_ref - 5.0, ref_center)
    slope_hi = center_at(t_ref + 5.0, ref_center)
    if slope_lo is None or slope_hi is None:
        slope = float("nan")
    else:
        slope = (slope_hi - slope_lo) / 10.0

    kept_t, kept_c, kept_d, lost = [], [], [], []
    for i, t in enumerate(temps):
        c = centers[i]
        if c is None:
            lost.append(t)
            continue
        kept_t.append(t)
        kept_c.append(c)
        kept_d.append(c - ref_center)
    return TemperatureShift(
        temperatures=kept_t,
        centers=kept_c,
        delta_b=kept_d,
        slope_at_ref=slope,
        t_ref=t_ref,
        lost=lost,
    )


def features_to_json(features: list[CrossingFeature], slopes: dict | None = None) -> str:
    """Structured feature report; slopes keyed by feature index (G/K)."""
    payload = []
    for i, f in enumerate(features):
        d = f.to_dict()
        if slopes and i in slopes:
            d["slope_G_per_K"] = round(slopes[i], 4)
        payload.append(d)
    return json.dumps({"features": payload}, indent=2)
