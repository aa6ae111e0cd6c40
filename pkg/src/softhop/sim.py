"""Event-driven simulation of the hopper on yielding ground, one hop at a time."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import RK45
from scipy.optimize import brentq

from .flow import StaticFlow, YieldingFlow
from .model import (
    EventKind,
    HopperState,
    HopRecord,
    HybridDomain,
    LegSpring,
    ModelParams,
    SpringMode,
    TransitionEvent,
    com_kinetic_energy,
    injected_energy,
    liftoff_reset,
    spring_update,
)

D = HybridDomain


class SimulationError(RuntimeError):
    """Integration or event bookkeeping broke down (not a failed hop)."""


@dataclass(frozen=True)
class SimConfig:
    """Numerical settings.

    ``method`` selects how each domain is advanced: ``"exact"`` evaluates the
    closed-form solution of the (linear) domain dynamics, ``"rk45"`` steps a
    Dormand-Prince pair with dense output at ``rel_tol``/``abs_tol``.  Events
    are bracketed on a grid of ``grid_density`` points per period of the
    fastest mode and refined to ``event_tol``.
    """

    method: str = "exact"
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    event_tol: float = 1e-10
    max_step: float = math.inf
    max_events_per_hop: int = 20000
    max_hops: int = 10000
    max_stance_time: float = 1e4
    grid_density: int = 16
    sample_dt: float | None = None

    def __post_init__(self):
        if self.method not in ("exact", "rk45"):
            raise ValueError(f"unknown method {self.method!r}")
        for name in ("rel_tol", "abs_tol", "event_tol", "max_step", "max_stance_time"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("max_events_per_hop", "max_hops", "grid_density"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.sample_dt is not None and not self.sample_dt > 0:
            raise ValueError("sample_dt must be positive")


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    states: list[HopperState] = field(default_factory=list)
    domains: list[HybridDomain] = field(default_factory=list)
    hops: list[HopRecord] = field(default_factory=list)

    def add(self, t: float, state: HopperState, domain: HybridDomain) -> None:
        if self.times and t <= self.times[-1]:
            return
        self.times.append(t)
        self.states.append(state)
        self.domains.append(domain)

    @property
    def eps_td(self) -> list[float]:
        """Touchdown energies: the start of every hop, then the final touchdown if reached."""
        out = [h.eps_td_in for h in self.hops]
        if self.hops and self.hops[-1].eps_td_out is not None:
            out.append(self.hops[-1].eps_td_out)
        return out


# ---------------------------------------------------------------------------
# dynamics


def _friction_accel(params: ModelParams, sign: float) -> float:
    return -(1.0 + params.mu) * params.phi_fric * sign


def domain_dynamics(domain: HybridDomain, state: HopperState, spring: LegSpring,
                    params: ModelParams, friction_sign: float = 0.0) -> tuple[float, float, float, float]:
    """Time derivative of (xi_b, xi_f, v_b, v_f) inside ``domain``."""
    mu = params.mu
    if domain is D.FLIGHT:
        a = -1.0 - params.phi_fric * friction_sign
        return (state.v_b, state.v_f, a, a)
    phi_a = spring.stiffness * spring.deflection(state)
    a_b = -1.0 + (1.0 + mu) * phi_a + _friction_accel(params, friction_sign)
    if domain.is_static:
        return (state.v_b, 0.0, a_b, 0.0)
    if not mu > 0:
        raise ValueError("yielding dynamics are singular for a massless foot")
    a_f = -1.0 + (1.0 + mu) / mu * (-state.xi_f - phi_a)
    return (state.v_b, state.v_f, a_b, a_f)


class _RKFlow:
    """Dense-output RK45 solution with the same interface as the closed-form flows."""

    def __init__(self, domain, state, spring, params, friction_sign, period, config):
        self.period = period
        self.domain = domain

        def rhs(t, x):
            s = HopperState(*x)
            return np.array(domain_dynamics(domain, s, spring, params, friction_sign))

        self._rhs = rhs
        self._solver = RK45(rhs, 0.0, np.array(state.as_tuple(), dtype=float), math.inf,
                            rtol=config.rel_tol, atol=config.abs_tol,
                            max_step=min(config.max_step, period / 4.0))
        self._ends: list[float] = []
        self._dense = []

    def _ensure(self, t: float) -> None:
        while not self._ends or self._ends[-1] < t:
            msg = self._solver.step()
            if self._solver.status == "failed":
                raise SimulationError(f"RK45 step failed: {msg}")
            self._ends.append(self._solver.t)
            self._dense.append(self._solver.dense_output())

    def _x(self, t: float) -> np.ndarray:
        self._ensure(t)
        i = int(np.searchsorted(self._ends, t))
        return self._dense[i](t)

    def at(self, t):
        x = self._x(t)
        if self.domain.is_static:
            x[3] = 0.0
        return tuple(float(v) for v in x)

    def accel_at(self, t):
        d = self._rhs(t, np.array(self.at(t)))
        return (float(d[2]), float(d[3]))

    def sample(self, ts):
        out = np.empty((6, ts.size))
        for j, t in enumerate(ts):
            x = self.at(float(t))
            out[:4, j] = x
            out[4:, j] = self.accel_at(float(t))
        return out


# ---------------------------------------------------------------------------
# event functions: g = c . (xi_b, xi_f, v_b, v_f) + c0, crossing in `direction`


@dataclass(frozen=True)
class _Guard:
    kind: str
    coeffs: tuple[float, float, float, float]
    offset: float
    direction: float

    def value(self, x) -> float:
        c = self.coeffs
        return c[0] * x[0] + c[1] * x[1] + c[2] * x[2] + c[3] * x[3] + self.offset

    def rate(self, x, acc) -> float:
        c = self.coeffs
        return c[0] * x[2] + c[1] * x[3] + c[2] * acc[0] + c[3] * acc[1]


_PRIORITY = {"CE": 0, "RY": 1, "FS": 2, "LO": 3, "STALL": 4, "FRICTION": 5}


def _guards(domain: HybridDomain, spring: LegSpring, params: ModelParams) -> list[_Guard]:
    k, lam, m = spring.stiffness, spring.unloaded_length, params.foot_weight
    # applied force on the ground minus yield threshold, and applied force alone
    margin = _Guard("RY", (-k, k + 1.0, 0.0, 0.0), k * lam + m, +1.0)
    load = _Guard("LO", (-k, k, 0.0, 0.0), k * lam + m, -1.0)
    foot_stop = _Guard("FS", (0.0, 0.0, 0.0, 1.0), 0.0, +1.0)
    ce = _Guard("CE", (0.0, 0.0, 1.0, -1.0), 0.0, +1.0)
    guards = {
        D.YIELDING_COMPRESSION: [foot_stop, ce],
        D.STATIC_COMPRESSION: [margin, ce, load],
        D.YIELDING_EXTENSION: [foot_stop],
        D.STATIC_EXTENSION: [margin, load, _Guard("STALL", (0.0, 0.0, 1.0, 0.0), 0.0, -1.0)],
    }[domain]
    if params.phi_fric > 0:
        guards = guards + [_Guard("FRICTION", (0.0, 0.0, 1.0, 0.0), 0.0, 0.0)]
    return guards


def locate_event(flow, guards: list[_Guard], x0, config: SimConfig, friction_sign: float = 0.0):
    """First guard crossing of ``flow`` after time zero.

    Each guard is sampled on a uniform grid; a crossing is bracketed either by a
    sign change or by a sign change of its rate that hides a brief excursion
    between grid points, then refined with Brent's method.  Returns
    ``(kind, time, state)``.
    """
    h = flow.period / config.grid_density
    chunk = 32
    prev_t = 0.0
    prev_x = tuple(x0)
    prev_acc = flow.accel_at(0.0)

    def oriented(g: _Guard):
        if g.direction == 0.0:
            # crossing either way: orient against the starting side
            start = friction_sign if friction_sign != 0.0 else 1.0
            return -start
        return g.direction

    orient = [oriented(g) for g in guards]
    prev_s = [o * g.value(prev_x) for g, o in zip(guards, orient)]
    prev_r = [o * g.rate(prev_x, prev_acc) for g, o in zip(guards, orient)]

    while prev_t < config.max_stance_time:
        ts = prev_t + h * np.arange(1, chunk + 1)
        X = flow.sample(ts)
        hits = []
        for gi, (g, o) in enumerate(zip(guards, orient)):
            c = g.coeffs
            s = o * (c[0] * X[0] + c[1] * X[1] + c[2] * X[2] + c[3] * X[3] + g.offset)
            r = o * (c[0] * X[2] + c[1] * X[3] + c[2] * X[4] + c[3] * X[5])
            s_all = np.concatenate(([prev_s[gi]], s))
            r_all = np.concatenate(([prev_r[gi]], r))
            t_all = np.concatenate(([prev_t], ts))
            cross = (s_all[:-1] < 0) & (s_all[1:] >= 0)
            hump = (s_all[:-1] < 0) & (s_all[1:] < 0) & (r_all[:-1] > 0) & (r_all[1:] < 0)
            for j in np.flatnonzero(cross | hump):
                lo, hi = float(t_all[j]), float(t_all[j + 1])
                if not cross[j]:
                    peak = _refine(lambda t: o * g.rate(flow.at(t), flow.accel_at(t)), lo, hi, config)
                    if o * g.value(flow.at(peak)) < 0:
                        continue
                    hi = peak
                fn = lambda t: o * g.value(flow.at(t))
                root = _refine(fn, lo, hi, config)
                # step to the side where the new domain's condition already holds
                for _ in range(8):
                    if fn(root) >= 0 or root >= hi:
                        break
                    root = min(root + config.event_tol, hi)
                hits.append((root, _PRIORITY[g.kind], g.kind))
                break
        if hits:
            tol = config.event_tol
            first = min(t for t, _, _ in hits)
            tied = [hit for hit in hits if hit[0] <= first + tol]
            t_evt, _, kind = min(tied, key=lambda hit: (hit[1], hit[0]))
            return kind, t_evt, HopperState(*flow.at(t_evt))
        prev_t = float(ts[-1])
        prev_s = [o * g.value(X[:4, -1]) for g, o in zip(guards, orient)]
        prev_r = [o * g.rate(X[:4, -1], X[4:, -1]) for g, o in zip(guards, orient)]
    raise SimulationError(f"no event within stance time {config.max_stance_time}")


def _refine(fn, lo: float, hi: float, config: SimConfig) -> float:
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0 or flo * fhi > 0:
        return hi
    return brentq(fn, lo, hi, xtol=config.event_tol, rtol=4 * np.finfo(float).eps)


# ---------------------------------------------------------------------------
# hop simulation


@dataclass
class _StanceOutcome:
    state: HopperState
    time: float
    lo_loss: float
    depth_ce: float | None
    max_depth: float
    eps_inj: float
    friction_loss: float
    failed_reason: str = ""


class _Simulator:
    def __init__(self, params: ModelParams, config: SimConfig, trajectory: Trajectory | None = None):
        if not params.mu > 0:
            raise ValueError("simulation requires a positive foot mass ratio")
        if params.phi_fric >= 1.0:
            raise ValueError("guide-rail friction must be below the total weight")
        self.params = params
        self.config = config
        self.trajectory = trajectory
        self.compression = LegSpring(params.kappa_c, params.lambda_c)

    # -- flows ---------------------------------------------------------------

    def _flow(self, domain, state, spring, sign):
        bias = _friction_accel(self.params, sign)
        exact = (StaticFlow if domain.is_static else YieldingFlow)(state, spring, self.params.mu, bias)
        if self.config.method == "exact":
            return exact
        return _RKFlow(domain, state, spring, self.params, sign, exact.period, self.config)

    def _friction_sign(self, domain, state, spring) -> float:
        if self.params.phi_fric == 0.0:
            return 0.0
        if state.v_b != 0.0:
            return math.copysign(1.0, state.v_b)
        free = domain_dynamics(domain, state, spring, self.params, 0.0)[2]
        if abs(free) <= (1.0 + self.params.mu) * self.params.phi_fric:
            raise SimulationError("body held by guide-rail friction (stiction is not modeled)")
        return math.copysign(1.0, free)

    def _record(self, flow, t0: float, t1: float, domain: HybridDomain) -> None:
        traj = self.trajectory
        if traj is None or self.config.sample_dt is None:
            return
        dt = self.config.sample_dt
        local = np.arange(dt, t1 - t0, dt)
        for tl in local:
            traj.add(t0 + float(tl), HopperState(*flow.at(float(tl))), domain)
        traj.add(t1, HopperState(*flow.at(t1 - t0)), domain)

    # -- stance --------------------------------------------------------------

    def stance(self, state: HopperState, t: float, events: list[TransitionEvent],
               domain: HybridDomain = D.YIELDING_COMPRESSION) -> _StanceOutcome:
        params, config = self.params, self.config
        spring = self.compression if not domain.is_extension else None
        if spring is None:
            raise ValueError("stance must start in compression")
        max_depth = max(0.0, -state.xi_f)
        depth_ce = None
        eps_inj = 0.0
        friction = 0.0
        n_events = 0
        while True:
            sign = self._friction_sign(domain, state, spring)
            flow = self._flow(domain, state, spring, sign)
            kind, dt, new = locate_event(flow, _guards(domain, spring, params), state.as_tuple(), config, sign)
            self._record(flow, t, t + dt, domain)
            t += dt
            friction += params.phi_fric * abs(new.xi_b - state.xi_b)
            if domain.is_yielding:
                max_depth = max(max_depth, -new.xi_f)
            state = new
            n_events += 1
            if n_events > config.max_events_per_hop:
                raise SimulationError(f"more than {config.max_events_per_hop} events in one stance")

            if kind == "FRICTION":
                state = HopperState(state.xi_b, state.xi_f, 0.0, state.v_f)
                continue
            if kind == "STALL":
                return _StanceOutcome(state, t, 0.0, depth_ce, max_depth, eps_inj, friction,
                                      "body stalled without liftoff")
            if kind == "FS":
                state = HopperState(state.xi_b, state.xi_f, state.v_b, 0.0)
                load = spring.stiffness * spring.deflection(state) + params.foot_weight
                if load < 0:
                    events.append(TransitionEvent(EventKind.LIFTOFF, t))
                    return self._liftoff(state, spring, t, depth_ce, max_depth, eps_inj, friction)
                events.append(TransitionEvent(EventKind.FOOT_STOP, t))
                domain = D.STATIC_EXTENSION if domain.is_extension else D.STATIC_COMPRESSION
            elif kind == "RY":
                events.append(TransitionEvent(EventKind.REYIELD, t))
                domain = D.YIELDING_EXTENSION if domain.is_extension else D.YIELDING_COMPRESSION
            elif kind == "LO":
                events.append(TransitionEvent(EventKind.LIFTOFF, t))
                return self._liftoff(state, spring, t, depth_ce, max_depth, eps_inj, friction)
            elif kind == "CE":
                if domain.is_static:
                    state = HopperState(state.xi_b, state.xi_f, 0.0, 0.0)
                else:
                    v = 0.5 * (state.v_b + state.v_f)
                    state = HopperState(state.xi_b, state.xi_f, v, v)
                events.append(TransitionEvent(EventKind.COMPRESSION_EXTENSION, t))
                depth_ce = state.xi_f
                try:
                    extension = spring_update(state, spring, params)
                except ValueError as exc:
                    return _StanceOutcome(state, t, 0.0, depth_ce, max_depth, eps_inj, friction,
                                          f"no valid extension spring: {exc}")
                eps_inj = injected_energy(state, spring, extension)
                spring = extension
                if params.phi > 1.0:
                    events.append(TransitionEvent(EventKind.REYIELD, t))
                    domain = D.YIELDING_EXTENSION
                else:
                    domain = D.YIELDING_EXTENSION if domain.is_yielding else D.STATIC_EXTENSION
            else:  # pragma: no cover
                raise SimulationError(f"unexpected event {kind}")

    def _liftoff(self, state, spring, t, depth_ce, max_depth, eps_inj, friction) -> _StanceOutcome:
        post, loss = liftoff_reset(state, self.params, spring)
        if self.trajectory is not None and self.config.sample_dt is not None:
            domain = D.STATIC_EXTENSION if spring.mode is SpringMode.EXTENSION else D.STATIC_COMPRESSION
            self.trajectory.add(t, state, domain)
        return _StanceOutcome(post, t, loss, depth_ce, max_depth, eps_inj, friction)

    # -- flight --------------------------------------------------------------

    def flight(self, state: HopperState, t: float):
        """Ballistic flight after liftoff.

        Returns ``(touchdown_state, time, apex_clearance, friction_loss)``;
        the touchdown state is ``None`` when the foot cannot clear the surface.
        """
        fr = self.params.phi_fric
        z, v = state.xi_f, state.v_b
        offset = state.xi_b - state.xi_f
        t_up = 0.0
        friction = 0.0
        apex = z
        if v > 0:
            t_up = v / (1.0 + fr)
            apex = z + v * v / (2.0 * (1.0 + fr))
            friction += fr * (apex - z)
            self._record_flight(t, z, v, -(1.0 + fr), t_up, offset)
        elif z < 0:
            return None, t, z, friction
        if apex < 0:
            return None, t + t_up, apex, friction
        g_down = 1.0 - fr
        v0 = min(v, 0.0)
        # apex (or start) height `apex` with downward speed -v0 ... fall to zero
        t_down = (v0 + math.sqrt(v0 * v0 + 2.0 * g_down * apex)) / g_down
        friction += fr * apex
        self._record_flight(t + t_up, apex, v0, -g_down, t_down, offset)
        v_td = v0 - g_down * t_down
        td = HopperState(offset, 0.0, v_td, v_td)
        return td, t + t_up + t_down, apex, friction

    def _record_flight(self, t0, z0, v0, a, duration, offset):
        traj = self.trajectory
        if traj is None or self.config.sample_dt is None:
            return
        dt = self.config.sample_dt
        for tl in list(np.arange(dt, duration, dt)) + [duration]:
            tl = float(tl)
            z = z0 + v0 * tl + 0.5 * a * tl * tl
            v = v0 + a * tl
            traj.add(t0 + tl, HopperState(z + offset, z, v, v), D.FLIGHT)

    # -- one hop -------------------------------------------------------------

    def hop(self, state: HopperState, t: float, domain: HybridDomain = D.YIELDING_COMPRESSION):
        mu = self.params.mu
        eps_in = com_kinetic_energy(state, mu)
        events: list[TransitionEvent] = [TransitionEvent(EventKind.TOUCHDOWN, t)]
        out = self.stance(state, t, events, domain)
        ground = 0.5 * out.max_depth ** 2
        if out.failed_reason:
            rec = HopRecord(eps_in, None, out.eps_inj, ground, 0.0, out.friction_loss, out.depth_ce,
                            out.max_depth, None, tuple(events), True, out.failed_reason)
            return rec, None, out.time
        td, t_end, apex, fr_flight = self.flight(out.state, out.time)
        friction = out.friction_loss + fr_flight
        if td is None:
            rec = HopRecord(eps_in, None, out.eps_inj, ground, out.lo_loss, friction, out.depth_ce,
                            out.max_depth, apex, tuple(events), True, "foot cannot clear its crater")
            return rec, None, t_end
        eps_out = com_kinetic_energy(td, mu)
        rec = HopRecord(eps_in, eps_out, out.eps_inj, ground, out.lo_loss, friction, out.depth_ce,
                        out.max_depth, apex, tuple(events), False)
        return rec, td, t_end


def touchdown_state(eps_td: float, params: ModelParams) -> HopperState:
    if eps_td < 0:
        raise ValueError("touchdown energy must be non-negative")
    v = -math.sqrt(2.0 * eps_td)
    return HopperState(params.lambda_c, 0.0, v, v)


def simulate_hop(eps_td: float, params: ModelParams, config: SimConfig | None = None) -> HopRecord:
    """Simulate one hop starting at touchdown with COM kinetic energy ``eps_td``."""
    sim = _Simulator(params, config or SimConfig())
    rec, _, _ = sim.hop(touchdown_state(eps_td, params), 0.0)
    return rec


def initial_domain(state: HopperState, params: ModelParams) -> HybridDomain:
    if state.xi_f > 0 or (state.xi_f == 0 and state.v_f > 0):
        return D.FLIGHT
    if state.v_f < 0 or state.xi_f == 0:
        return D.YIELDING_COMPRESSION
    if state.v_f > 0:
        raise ValueError("foot below the surface moving upward is not a valid initial state")
    applied = params.kappa_c * (params.lambda_c - state.xi_b + state.xi_f) + params.foot_weight
    return D.YIELDING_COMPRESSION if applied >= -state.xi_f else D.STATIC_COMPRESSION


def simulate_trajectory(initial_state: HopperState, params: ModelParams,
                        config: SimConfig | None = None, n_hops: int = 10) -> Trajectory:
    """Chain hops from an arbitrary initial state until ``n_hops`` or a failed hop.

    A state in flight must have the foot locked to the body at leg length
    ``lambda_c``, as the flight controller keeps it.
    """
    config = config or SimConfig()
    n_hops = min(n_hops, config.max_hops)
    traj = Trajectory()
    sim = _Simulator(params, config, traj)
    state, t = initial_state, 0.0
    domain = initial_domain(state, params)
    traj.add(0.0, state, domain)
    if domain is D.FLIGHT:
        if abs(state.xi_b - state.xi_f - params.lambda_c) > 1e-9 or state.v_b != state.v_f:
            raise ValueError("flight state must have the leg at lambda_c and the foot at rest relative to the body")
        state, t, _, _ = sim.flight(state, 0.0)
        if state is None:
            return traj
        domain = D.YIELDING_COMPRESSION
        traj.add(t, state, domain)
    for _ in range(n_hops):
        rec, state, t = sim.hop(state, t, domain)
        traj.hops.append(rec)
        domain = D.YIELDING_COMPRESSION
        if state is None:
            break
    return traj
