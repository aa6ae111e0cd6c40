"""Dynamics of one-dimensional return maps: fixed points, periodic orbits,
bifurcation scans, basins of attraction and constant-fixed-point sweeps.

Everything here works on a :class:`MapFunction`, so the same routines apply
to the closed-form massless map and to the simulated finite-mass map.  A
map value below zero (or NaN) means the hop failed.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import massless
from .massless import NoGaitError
from .model import ModelParams
from .sim import SimConfig, SimulationError, simulate_hop

# ---------------------------------------------------------------------------
# map adapters


class MapFunction:
    """An energy return map ``eps_td -> P(eps_td)`` on ``[lower, upper]``.

    ``scale`` is a typical energy used to size search intervals.
    """

    lower: float = 0.0
    upper: float = math.inf
    scale: float = 1.0
    params: ModelParams | None = None

    def __call__(self, eps: float) -> float:
        raise NotImplementedError

    @staticmethod
    def failed(value: float) -> bool:
        return not value >= 0.0

    def iterate(self, eps: float, n: int) -> float:
        for _ in range(n):
            if self.failed(eps):
                return eps
            eps = self(eps)
        return eps


class ClosedFormMap(MapFunction):
    """Massless-foot map, evaluated in closed form."""

    def __init__(self, params: ModelParams):
        self.params = params
        self.scale = max(params.eps_inj, 1.0)

    def __call__(self, eps: float) -> float:
        return float(massless.map_eval(eps, self.params))

    def slope(self, eps: float) -> float:
        return massless.map_slope(eps, self.params)

    def __repr__(self):
        return f"ClosedFormMap({self.params!r})"


class SimulatedMap(MapFunction):
    """Finite-foot-mass map, one simulated hop per evaluation."""

    def __init__(self, params: ModelParams, config: SimConfig | None = None):
        if not params.mu > 0:
            raise ValueError("simulated map needs mu > 0")
        self.params = params
        self.config = config or SimConfig()
        self.scale = max(params.eps_inj, 1.0)

    def __call__(self, eps: float) -> float:
        return simulate_hop(eps, self.params, self.config).map_value

    def __repr__(self):
        return f"SimulatedMap({self.params!r})"


class CallableMap(MapFunction):
    """Wrap a plain function (handy for tests and toy maps)."""

    def __init__(self, fn: Callable[[float], float], scale: float = 1.0, upper: float = math.inf):
        self.fn = fn
        self.scale = scale
        self.upper = upper

    def __call__(self, eps: float) -> float:
        return float(self.fn(eps))


def make_map(params: ModelParams, engine: str = "auto", config: SimConfig | None = None) -> MapFunction:
    """``closed_form`` needs ``mu == 0``, ``simulate`` needs ``mu > 0``; ``auto`` picks by ``mu``."""
    if engine == "auto":
        engine = "simulate" if params.mu > 0 else "closed_form"
    if engine == "closed_form":
        if params.mu != 0:
            raise ValueError("the closed-form map is the mu = 0 limit; set mu = 0")
        return ClosedFormMap(params)
    if engine == "simulate":
        return SimulatedMap(params, config)
    raise ValueError(f"unknown engine {engine!r}")


# ---------------------------------------------------------------------------
# ordered parallel map


def ordered_map(fn, items: Sequence, workers: int = 1) -> list:
    """``[fn(x) for x in items]``, optionally on a process pool; order is by index."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


# ---------------------------------------------------------------------------
# fixed points and eigenvalues


def _scan_grid(lo: float, hi: float, n: int) -> np.ndarray:
    # quadratic spacing: fine near the low end where finite-mass maps wiggle
    return lo + (hi - lo) * np.linspace(0.0, 1.0, n) ** 2


def search_upper(f: MapFunction, lo: float = 0.0) -> float:
    """An energy above every fixed point: grows ``4 * scale`` until the map falls below the identity."""
    hi = max(4.0 * f.scale, lo + 1.0)
    for _ in range(20):
        v = f(hi)
        if not np.isfinite(v) or v < hi:
            return hi
        hi *= 4.0
    return hi


def find_fixed_points(f: MapFunction, lo: float = 0.0, hi: float | None = None,
                      n: int = 96, xtol: float = 1e-9) -> list[float]:
    """All sign changes of ``P(eps) - eps`` on a scan of ``[lo, hi]``, refined by Brent's method.

    A bracket whose refined point is not on the identity (the map jumps
    across it, as at a failure edge) is dropped.
    """
    if hi is None:
        hi = search_upper(f, lo)
    xs = _scan_grid(lo, hi, n)
    g = np.array([f(x) - x for x in xs])
    roots = []
    for i in range(n - 1):
        a, b = g[i], g[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)) or a * b > 0:
            continue
        if a == 0:
            roots.append(float(xs[i]))
            continue
        if b == 0:
            continue
        r = brentq(lambda x: f(x) - x, xs[i], xs[i + 1], xtol=xtol, rtol=1e-14)
        fr = f(r)
        # a jump (failure edge or event-sequence switch) is not a crossing of the identity
        if f.failed(fr) or abs(fr - r) > 1e-6 * max(1.0, r):
            continue
        roots.append(float(r))
    if g[-1] == 0:
        roots.append(float(xs[-1]))
    return roots


def numeric_fixed_point(f: MapFunction, bracket: tuple[float, float] | None = None,
                        xtol: float = 1e-9) -> float:
    """Root of ``P(eps) - eps``.

    With a sign-changing bracket this is a single Brent solve; otherwise the
    bracket (default ``[0, search_upper(f)]``) is scanned and the first root
    found is returned.
    """
    lo, hi = bracket if bracket is not None else (0.0, search_upper(f))
    ga, gb = f(lo) - lo, f(hi) - hi
    if ga * gb < 0:
        r = brentq(lambda x: f(x) - x, lo, hi, xtol=xtol, rtol=1e-14)
        fr = f(r)
        if not f.failed(fr) and abs(fr - r) <= 1e-6 * max(1.0, r):
            return float(r)
    if ga == 0:
        return float(lo)
    roots = find_fixed_points(f, lo, hi, xtol=xtol)
    if not roots:
        raise NoGaitError(f"no fixed point of {f!r} on [{lo}, {hi}]")
    return roots[0]


def numeric_eigenvalue(f: MapFunction, eps_star: float, step: float | None = None) -> float:
    """Central-difference slope at ``eps_star`` with one Richardson step."""
    h = step if step is not None else 1e-4 * max(1.0, eps_star)
    if not h > 0:
        raise ValueError("step must be positive")
    if eps_star - h < f.lower:
        h = max(eps_star - f.lower, 0.0) or h
    if eps_star - h < f.lower:
        # forward differences, second order
        p0, p1, p2 = f(eps_star), f(eps_star + h), f(eps_star + 2 * h)
        return (-3 * p0 + 4 * p1 - p2) / (2 * h)

    def central(hh):
        a, b = f(eps_star + hh), f(eps_star - hh)
        if f.failed(a) or f.failed(b):
            raise NoGaitError(f"map fails within {hh} of {eps_star}")
        return (a - b) / (2 * hh)

    d1 = central(h)
    d2 = central(h / 2)
    return (4 * d2 - d1) / 3


# ---------------------------------------------------------------------------
# orbits


class Regime(enum.Enum):
    PERIODIC = "periodic"
    APERIODIC = "aperiodic"
    FAILED = "failed"
    FIXED_POINT = "fixed-point"
    ERROR = "error"


@dataclass(frozen=True)
class BifurcationRecord:
    """One attractor (or fixed-point branch) found at one parameter value.

    ``period`` is the minimal period for periodic orbits and fixed-point
    branches, else ``None``.  ``stable`` is true for attracting orbits and
    for fixed points with ``|eigenvalue| < 1``.
    """

    value: float
    regime: Regime
    period: int | None
    attractor_samples: tuple[float, ...]
    stable: bool
    seed: float | None = None
    eigenvalue: float | None = None


def detect_period(samples: np.ndarray, tol: float = 1e-5, max_period: int | None = None) -> int | None:
    """Smallest ``n`` with ``samples[i+n] ~ samples[i]`` for all ``i`` (relative ``tol``)."""
    s = np.asarray(samples, dtype=float)
    if max_period is None:
        max_period = max(1, s.size // 4)
    floor = 1e-12
    for n in range(1, max_period + 1):
        a, b = s[n:], s[:-n]
        if a.size == 0:
            break
        if np.all(np.abs(a - b) <= tol * np.maximum(np.abs(b), floor)):
            return n
    return None


def iterate_and_detect_period(f: MapFunction, eps0: float, transient: int = 500, samples: int = 256,
                              tol: float = 1e-5, value: float = math.nan,
                              early_exit: float | None = 1e-13, max_cycle: int = 16) -> BifurcationRecord:
    """Iterate ``f`` from ``eps0``, discard ``transient`` iterates, classify the next ``samples``.

    With ``early_exit`` set, iteration stops once the orbit repeats a cycle
    of length at most ``max_cycle`` to that relative precision; the rest of
    the sample window is filled by continuing the cycle.
    """
    if transient < 0 or samples < 1:
        raise ValueError("transient must be >= 0 and samples >= 1")
    total = transient + samples
    orbit: list[float] = []
    x = float(eps0)
    for _ in range(total):
        x = f(x)
        if f.failed(x):
            return BifurcationRecord(value, Regime.FAILED, None, tuple(orbit[-samples:]), False, eps0)
        orbit.append(x)
        if early_exit is not None and len(orbit) > 2 * max_cycle:
            n = _exact_cycle(orbit, max_cycle, early_exit)
            if n:
                while len(orbit) < total:
                    orbit.append(orbit[-n])
                break
    window = np.array(orbit[transient:])
    n = detect_period(window, tol, max(1, samples // 4))
    if n is None:
        return BifurcationRecord(value, Regime.APERIODIC, None, tuple(window.tolist()), False, eps0)
    return BifurcationRecord(value, Regime.PERIODIC, n, tuple(window[:n].tolist()), True, eps0)


def _exact_cycle(orbit: list[float], max_cycle: int, rel: float) -> int:
    tail = orbit[-2 * max_cycle:]
    for n in range(1, max_cycle + 1):
        ok = True
        for i in range(1, n + 1):
            a, b = tail[-i], tail[-i - n]
            if abs(a - b) > rel * max(abs(a), 1e-300):
                ok = False
                break
        if ok:
            return n
    return 0


# ---------------------------------------------------------------------------
# bifurcation scan


@dataclass(frozen=True)
class _CellTask:
    params: ModelParams
    name: str
    value: float
    engine: str
    config: SimConfig | None
    seeds: tuple[float, ...] | None
    transient: int
    samples: int
    tol: float
    fixed_points: bool
    scan_points: int


def default_seeds(f: MapFunction) -> tuple[float, ...]:
    """``0.5 * guess``, ``2 * guess`` and ``1e-3``, where ``guess`` is a fixed point estimate."""
    guess = None
    try:
        roots = find_fixed_points(f, 0.0, None, n=48)
        if roots:
            guess = roots[0]
    except (ValueError, RuntimeError):
        guess = None
    if guess is None and f.params is not None:
        try:
            guess = massless.fixed_point(f.params)
        except (NoGaitError, ArithmeticError):
            guess = None
    if guess is None:
        guess = f.scale
    return (0.5 * guess, 2.0 * guess, 1e-3)


def _scan_cell(task: _CellTask) -> list[BifurcationRecord]:
    try:
        params = task.params.with_(**{task.name: task.value})
        f = make_map(params, task.engine, task.config)
        seeds = task.seeds if task.seeds is not None else default_seeds(f)
        out = [iterate_and_detect_period(f, s, task.transient, task.samples, task.tol, task.value)
               for s in seeds]
        if task.fixed_points:
            for r in find_fixed_points(f, 0.0, None, n=task.scan_points):
                try:
                    lam = numeric_eigenvalue(f, r)
                except NoGaitError:
                    continue
                out.append(BifurcationRecord(task.value, Regime.FIXED_POINT, 1, (r,), abs(lam) < 1.0,
                                             None, lam))
        return out
    except (SimulationError, ValueError, ArithmeticError):
        # recorded, so one bad cell does not abort the sweep
        return [BifurcationRecord(task.value, Regime.ERROR, None, (), False)]


def bifurcation_scan(params: ModelParams, name: str, grid: Iterable[float], *, engine: str = "auto",
                     config: SimConfig | None = None, seeds: Sequence[float] | None = None,
                     transient: int = 500, samples: int = 256, tol: float = 1e-5,
                     fixed_points: bool = True, scan_points: int = 96,
                     workers: int = 1) -> list[BifurcationRecord]:
    """Attractors (per seed) and period-one branches over a one-parameter sweep.

    Records are ordered by grid index, then seeds, then fixed points in
    increasing energy.  Each cell is independent, so ``workers`` only
    changes wall time.
    """
    if name not in ModelParams.__dataclass_fields__:
        raise ValueError(f"unknown parameter {name!r}")
    grid = [float(v) for v in grid]
    if not grid:
        raise ValueError("empty grid")
    tasks = [_CellTask(params, name, v, engine, config, tuple(seeds) if seeds is not None else None,
                       transient, samples, tol, fixed_points, scan_points) for v in grid]
    cells = ordered_map(_scan_cell, tasks, workers)
    return [rec for cell in cells for rec in cell]


# ---------------------------------------------------------------------------
# basins of attraction


class BasinClass(enum.Enum):
    GLOBAL = "global"
    BANDED = "banded"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class Band:
    lo: float
    hi: float
    depth: int


@dataclass(frozen=True)
class BasinReport:
    """Basin structure of a period-one gait.

    ``failure_interval`` is ``A_0``, the set where the map is negative;
    ``bands`` are its preimages (sorted, disjoint), tagged with the number
    of hops that land them in ``A_0``.
    """

    classification: BasinClass
    fixed_point: float
    eigenvalue: float
    map_minimum: tuple[float, float] | None
    failure_interval: tuple[float, float] | None
    bands: tuple[Band, ...]
    depth: int


def _monotone_branches(f: MapFunction, x_min: float, closed_form: bool,
                       upper: float) -> list[tuple[float, float, int]]:
    """``(lo, hi, direction)`` pieces on which ``f`` is monotone."""
    if closed_form:
        cuts = [0.0] + [float(e) for e in massless.critical_points(f.params)] + [math.inf]
        direction = -1 if massless.map_slope(0.0, f.params) < 0 else 1
        pieces = []
        for lo, hi in zip(cuts, cuts[1:]):
            if hi > lo:
                pieces.append((lo, hi, direction))
            direction = -direction
        return pieces
    xs = _scan_grid(0.0, upper, 256)
    ys = np.array([f(x) for x in xs])
    d = np.sign(np.diff(ys))
    pieces = []
    start = 0
    for i in range(1, d.size):
        if d[i] != d[start] and d[i] != 0:
            pieces.append((float(xs[start]), float(xs[i]), int(d[start])))
            start = i
    pieces.append((float(xs[start]), math.inf, int(d[start]) or 1))
    return pieces


def _solve_on_branch(f: MapFunction, level: float, lo: float, hi: float, direction: int) -> float | None:
    """``x`` in ``[lo, hi]`` with ``f(x) == level`` on a monotone piece; ``None`` if out of range."""
    if math.isinf(hi):
        hi = max(2.0 * lo, 1.0)
        while (f(hi) - level) * direction < 0:
            hi *= 2.0
            if hi > 1e15:
                return None
    flo, fhi = f(lo) - level, f(hi) - level
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if flo * fhi > 0:
        return None
    return float(brentq(lambda x: f(x) - level, lo, hi, xtol=1e-13, rtol=1e-14))


def _branch_preimage(f: MapFunction, target: tuple[float, float], piece) -> tuple[float, float] | None:
    u, v = target
    lo, hi, direction = piece
    f_lo = f(lo)
    f_hi = math.inf if math.isinf(hi) else f(hi)
    if direction < 0:
        f_lo, f_hi = f_hi, f_lo  # now f_lo is the smaller value on the piece
    # range of f on the piece is [f_lo, f_hi]
    a, b = max(u, f_lo), min(v, f_hi)
    if a >= b:
        return None
    xa = _solve_on_branch(f, a, lo, hi, direction)
    xb = _solve_on_branch(f, b, lo, hi, direction)
    if xa is None or xb is None:
        return None
    return (min(xa, xb), max(xa, xb))


def _merge(intervals: list[tuple[float, float]], gap: float = 0.0) -> list[tuple[float, float]]:
    """Union of intervals, joining those that touch (within ``gap``)."""
    out: list[list[float]] = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1] + gap:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(lo, hi) for lo, hi in out]


def _minimum(f: MapFunction, closed_form: bool, eps_star: float) -> tuple[float, float]:
    if closed_form:
        return massless.map_minimum(f.params)
    upper = 5.0 * max(eps_star, 1e-3)
    xs = _scan_grid(0.0, upper, 256)
    ys = np.array([f(x) for x in xs])
    i = int(np.argmin(ys))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
    if b > a:
        res = minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": 1e-10})
        if res.fun < ys[i]:
            return float(res.x), float(res.fun)
    return float(xs[i]), float(ys[i])


def classify_basin(params: ModelParams, closed_form: bool = True, preimage_depth: int = 12,
                   resolution: float = 1e-6, config: SimConfig | None = None) -> BasinReport:
    """Global, banded or unstable basin of the period-one gait.

    The closed-form map is split into monotone pieces at its critical
    points; for moderate force ratios it decreases then increases, so
    ``A_0`` is one interval with at most two preimages per band.  Simulated
    maps are split into monotone pieces on a grid.
    """
    f = ClosedFormMap(params) if closed_form else SimulatedMap(params, config)
    if closed_form:
        eps_star = massless.fixed_point(params)
        lam = massless.eigenvalue(params, eps_star)
    else:
        eps_star = numeric_fixed_point(f)
        lam = numeric_eigenvalue(f, eps_star)
    if abs(lam) >= 1.0:
        return BasinReport(BasinClass.UNSTABLE, eps_star, lam, None, None, (), 0)
    if lam >= 0 and closed_form and len(massless.critical_points(params)) <= 1:
        return BasinReport(BasinClass.GLOBAL, eps_star, lam, None, None, (), 0)
    x_min, p_min = _minimum(f, closed_form, eps_star)
    if p_min > 0:
        return BasinReport(BasinClass.GLOBAL, eps_star, lam, (x_min, p_min), None, (), 0)

    pieces = _monotone_branches(f, x_min, closed_form, 5.0 * max(eps_star, x_min, 1e-3))
    # A_0: where the map is negative, i.e. the preimage of (-inf, 0)
    a0 = None
    parts = _merge([p for p in (_branch_preimage(f, (-math.inf, 0.0), pc) for pc in pieces) if p])
    if parts:
        a0 = (min(p[0] for p in parts), max(p[1] for p in parts))
    if a0 is None:
        return BasinReport(BasinClass.GLOBAL, eps_star, lam, (x_min, p_min), None, (), 0)

    bands: list[Band] = []
    frontier = parts
    reached = 0
    for depth in range(1, preimage_depth + 1):
        nxt = []
        for target in frontier:
            for pc in pieces:
                pre = _branch_preimage(f, target, pc)
                if pre is None or pre[1] - pre[0] < resolution:
                    continue
                nxt.append(pre)
        nxt = _merge(nxt, resolution)
        if not nxt:
            break
        reached = depth
        bands.extend(Band(lo, hi, depth) for lo, hi in nxt)
        frontier = nxt
    bands.sort(key=lambda b: b.lo)
    return BasinReport(BasinClass.BANDED, eps_star, lam, (x_min, p_min), a0, tuple(bands), reached)


def band_lands_in_failure(f: MapFunction, band: Band, failure: tuple[float, float],
                          points: int = 5) -> bool:
    """Forward check: ``depth`` hops from inside ``band`` land in ``failure``."""
    lo, hi = failure
    for x in np.linspace(band.lo, band.hi, points + 2)[1:-1]:
        y = float(x)
        for _ in range(band.depth):
            y = f(y)
        if not (lo <= y <= hi or f(y) < 0):
            return False
    return True


# ---------------------------------------------------------------------------
# constant fixed-point surface and constant-eigenvalue curves


@dataclass(frozen=True)
class SurfaceCell:
    phi: float
    kappa_c: float
    eps_inj: float | None
    eigenvalue: float | None
    efficiency: float | None
    stability_margin: float | None
    stable: bool

    @property
    def exists(self) -> bool:
        """A solution exists and the gait is linearly stable."""
        return self.eps_inj is not None and self.stable


def injection_for_fixed_point(eps_star: float, phi: float, kappa_c: float) -> float | None:
    """Injected energy whose massless-map fixed point is ``eps_star``.

    The fixed point condition is that the hop loses exactly what is
    injected, i.e. ``|R(xi*)| == 1``; ``|R|`` falls from infinity to zero as
    the injection grows (strictly for ``phi`` up to about 5), so a bracket
    always exists.
    """
    if not eps_star > 0:
        raise ValueError("target fixed point must be positive")
    xi = massless.pre_injection_depth(eps_star, kappa_c)
    seed = 0.5 * xi * xi  # exact for phi <= 1

    def g(e):
        return math.log(abs(massless.coefficients(e, phi, kappa_c).ratio(xi)))

    lo, hi = seed, seed
    while g(lo) < 0:
        lo *= 0.5
        if lo < 1e-12:
            return None
    while g(hi) > 0:
        hi *= 2.0
        if hi > 1e15:
            return None
    if lo == hi:
        return lo
    return float(brentq(g, lo, hi, xtol=1e-14, rtol=1e-15))


def _surface_cell(args) -> SurfaceCell:
    eps_star, phi, kappa_c = args
    e = injection_for_fixed_point(eps_star, phi, kappa_c)
    if e is None:
        return SurfaceCell(phi, kappa_c, None, None, None, None, False)
    p = ModelParams(e, phi, kappa_c)
    lam = massless.eigenvalue(p, eps_star)
    eta = eps_star / (e + eps_star)
    alpha = 1.0 - lam * lam if -1.0 <= lam <= 1.0 else 0.0
    return SurfaceCell(phi, kappa_c, e, lam, eta, alpha, abs(lam) < 1.0)


def constant_fixed_point_surface(eps_star: float, phis: Iterable[float], kappas: Iterable[float],
                                 workers: int = 1) -> list[SurfaceCell]:
    """Per ``(phi, kappa_c)`` cell: the injection giving fixed point ``eps_star`` and its metrics.

    Cells are ordered with ``phi`` varying fastest.
    """
    tasks = [(float(eps_star), float(p), float(k)) for k in kappas for p in phis]
    return ordered_map(_surface_cell, tasks, workers)


@dataclass(frozen=True)
class CurvePoint:
    kappa_c: float
    phi: float
    eps_inj: float
    eigenvalue: float


def _eig_on_surface(eps_star: float, phi: float, kappa_c: float) -> float:
    e = injection_for_fixed_point(eps_star, phi, kappa_c)
    if e is None:
        return math.nan
    return massless.eigenvalue(ModelParams(e, phi, kappa_c), eps_star)


def constant_eigenvalue_curve(eps_star: float, target: float, kappas: Iterable[float],
                              phi_range: tuple[float, float] = (1.0, 10.0),
                              scan: int = 200) -> list[CurvePoint]:
    """Points ``(kappa_c, phi)`` on the ``eps_star`` surface with eigenvalue ``target``.

    The eigenvalue does not depend on ``phi`` below one, so only
    ``phi >= phi_range[0]`` is searched.  Kappas without a root are skipped.
    """
    out = []
    for k in kappas:
        k = float(k)
        phis = np.linspace(phi_range[0], phi_range[1], scan)
        vals = np.array([_eig_on_surface(eps_star, p, k) - target for p in phis])
        for i in range(scan - 1):
            a, b = vals[i], vals[i + 1]
            if not (np.isfinite(a) and np.isfinite(b)):
                continue
            if a == 0 or a * b < 0:
                phi = float(phis[i]) if a == 0 else float(brentq(
                    lambda p: _eig_on_surface(eps_star, p, k) - target, phis[i], phis[i + 1],
                    xtol=1e-13, rtol=1e-15))
                e = injection_for_fixed_point(eps_star, phi, k)
                lam = massless.eigenvalue(ModelParams(e, phi, k), eps_star)
                out.append(CurvePoint(k, phi, e, lam))
    return out
