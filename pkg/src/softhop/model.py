"""Core types and force laws for a vertical spring-legged monopod on yielding ground.

All quantities are dimensionless: mass is measured in total robot mass,
length in the static ground deflection under the total weight, time in the
period scale of total mass on the ground spring, and energy in
``m_u * g * q_u``.  Body mass is ``1/(1+mu)`` and foot mass ``mu/(1+mu)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace


class HybridDomain(enum.Enum):
    FLIGHT = "F"
    YIELDING_COMPRESSION = "YC"
    STATIC_COMPRESSION = "SC"
    YIELDING_EXTENSION = "YE"
    STATIC_EXTENSION = "SE"

    @property
    def is_stance(self) -> bool:
        return self is not HybridDomain.FLIGHT

    @property
    def is_yielding(self) -> bool:
        return self in (HybridDomain.YIELDING_COMPRESSION, HybridDomain.YIELDING_EXTENSION)

    @property
    def is_static(self) -> bool:
        return self in (HybridDomain.STATIC_COMPRESSION, HybridDomain.STATIC_EXTENSION)

    @property
    def is_extension(self) -> bool:
        return self in (HybridDomain.YIELDING_EXTENSION, HybridDomain.STATIC_EXTENSION)


class EventKind(enum.Enum):
    TOUCHDOWN = "TD"
    FOOT_STOP = "FS"
    REYIELD = "RY"
    COMPRESSION_EXTENSION = "CE"
    LIFTOFF = "LO"


class SpringMode(enum.Enum):
    COMPRESSION = "compression"
    EXTENSION = "extension"


@dataclass(frozen=True)
class TransitionEvent:
    kind: EventKind
    time: float


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless parameter set of the hopper and its controller.

    Parameters
    ----------
    eps_inj : float
        Energy injected at each compression-extension switch.
    phi : float
        Commanded ratio of ground-applied force to the local yield threshold
        right after injection.
    kappa_c : float
        Compression-mode leg stiffness over ground stiffness.
    mu : float
        Foot mass over body mass.  Zero is the massless-foot limit.
    lambda_c : float
        Compression-mode unloaded leg length.
    phi_fric : float
        Coulomb friction on the body (guide rail), in units of total weight.
    """

    eps_inj: float
    phi: float
    kappa_c: float
    mu: float = 0.0
    lambda_c: float = 35.0
    phi_fric: float = 0.0

    def __post_init__(self):
        checks = {
            "eps_inj": self.eps_inj >= 0,
            "phi": self.phi > 0,
            "kappa_c": self.kappa_c > 0,
            "mu": self.mu >= 0,
            "lambda_c": self.lambda_c > 0,
            "phi_fric": self.phi_fric >= 0,
        }
        for name, ok in checks.items():
            value = getattr(self, name)
            if not ok or not math.isfinite(value):
                raise ValueError(f"invalid {name}={value!r}")

    @property
    def phi_eff(self) -> float:
        return max(self.phi, 1.0)

    @property
    def kappa_eq_c(self) -> float:
        """Stiffness of the compression leg spring in series with the ground."""
        return self.kappa_c / (1.0 + self.kappa_c)

    @property
    def foot_weight(self) -> float:
        return self.mu / (1.0 + self.mu)

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class HopperState:
    xi_b: float
    xi_f: float
    v_b: float
    v_f: float

    def __post_init__(self):
        for name in ("xi_b", "xi_f", "v_b", "v_f"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite {name}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.xi_b, self.xi_f, self.v_b, self.v_f)

    def com_position(self, mu: float) -> float:
        return (self.xi_b + mu * self.xi_f) / (1.0 + mu)

    def com_velocity(self, mu: float) -> float:
        return (self.v_b + mu * self.v_f) / (1.0 + mu)


@dataclass(frozen=True)
class LegSpring:
    stiffness: float
    unloaded_length: float
    mode: SpringMode = SpringMode.COMPRESSION

    def __post_init__(self):
        if not self.stiffness > 0:
            raise ValueError(f"spring stiffness must be positive, got {self.stiffness!r}")

    def deflection(self, state: HopperState) -> float:
        return self.unloaded_length - state.xi_b + state.xi_f

    def energy(self, state: HopperState) -> float:
        return 0.5 * self.stiffness * self.deflection(state) ** 2


@dataclass(frozen=True)
class HopRecord:
    """Energy ledger of a single hop, from one touchdown to the next.

    ``eps_td_out`` is ``None`` when the hop failed.  ``apex_clearance`` is the
    highest foot position reached after liftoff (relative to undeformed
    ground); it equals ``eps_td_out`` for successful hops without friction
    and is negative when the hopper cannot clear its own crater.
    """

    eps_td_in: float
    eps_td_out: float | None
    eps_inj: float
    eps_ground_loss: float
    eps_lo_loss: float
    eps_friction_loss: float
    depth_ce: float | None
    max_depth: float
    apex_clearance: float | None
    events: tuple[TransitionEvent, ...] = field(default_factory=tuple)
    failed: bool = False
    reason: str = ""

    @property
    def map_value(self) -> float:
        """Value of the return map: next touchdown energy, or the (negative) clearance on failure."""
        if self.eps_td_out is not None:
            return self.eps_td_out
        if self.apex_clearance is not None:
            return min(self.apex_clearance, 0.0)
        return -self.max_depth

    def ledger_residual(self) -> float:
        if self.eps_td_out is None:
            return float("nan")
        expected = (self.eps_td_in + self.eps_inj - self.eps_ground_loss
                    - self.eps_lo_loss - self.eps_friction_loss)
        return self.eps_td_out - expected


# ---------------------------------------------------------------------------
# force laws


def actuator_force(state: HopperState, spring: LegSpring) -> float:
    """Leg force, positive when the leg pushes body and foot apart."""
    return spring.stiffness * spring.deflection(state)


def ground_force(state: HopperState, applied_actuator_force: float, mu: float) -> float:
    """Ground reaction force on the foot.

    Zero in flight, ``-xi_f`` while the foot intrudes, and in static stance
    the force that holds the foot at rest (leg force plus foot weight).
    """
    xi_f, v_f = state.xi_f, state.v_f
    if xi_f > 0 or v_f > 0:
        return 0.0
    if v_f < 0:
        return -xi_f
    if xi_f < 0:
        return applied_actuator_force + mu / (1.0 + mu)
    return 0.0


def com_kinetic_energy(state: HopperState, mu: float) -> float:
    return 0.5 * state.com_velocity(mu) ** 2


def spring_update(state_at_ce: HopperState, compression_spring: LegSpring,
                  params: ModelParams) -> LegSpring:
    """Extension-mode spring that injects ``eps_inj`` and sets the force ratio to ``phi``.

    With leg deflection ``d`` at the switch and target leg force
    ``F = -phi*xi_f - mu/(1+mu)``, the extension spring satisfies
    ``k_e*u = F`` and ``k_e*u**2 = 2*eps_inj + k_c*d**2``.
    """
    if not state_at_ce.xi_f < 0:
        raise ValueError("spring update requires the foot below the ground surface")
    d = compression_spring.deflection(state_at_ce)
    force = -params.phi * state_at_ce.xi_f - params.foot_weight
    if not force > 0:
        raise ValueError(f"commanded force ratio gives non-positive leg force {force!r}")
    work = 2.0 * params.eps_inj + compression_spring.stiffness * d * d
    if not work > 0:
        raise ValueError("zero spring energy after injection")
    kappa_e = force * force / work
    u = work / force
    return LegSpring(kappa_e, u + state_at_ce.xi_b - state_at_ce.xi_f, SpringMode.EXTENSION)


def injected_energy(state_at_ce: HopperState, compression_spring: LegSpring,
                    extension_spring: LegSpring) -> float:
    return extension_spring.energy(state_at_ce) - compression_spring.energy(state_at_ce)


def force_ratio(state_at_ce: HopperState, extension_spring: LegSpring, mu: float) -> float:
    applied = actuator_force(state_at_ce, extension_spring) + mu / (1.0 + mu)
    return applied / -state_at_ce.xi_f


def liftoff_loss(v_b: float, v_f: float, kappa_e: float, mu: float) -> float:
    """Energy dissipated by the flight controller when called exactly at liftoff."""
    return mu * (mu + kappa_e * (v_b - v_f) ** 2) / (2.0 * kappa_e * (1.0 + mu) ** 2)


def mechanical_energy(state: HopperState, spring: LegSpring | None, mu: float) -> float:
    """Kinetic + gravitational + leg-spring energy (ground work excluded)."""
    m_b = 1.0 / (1.0 + mu)
    m_f = mu / (1.0 + mu)
    e = 0.5 * m_b * state.v_b ** 2 + 0.5 * m_f * state.v_f ** 2
    e += m_b * state.xi_b + m_f * state.xi_f
    if spring is not None:
        e += spring.energy(state)
    return e


def liftoff_reset(state: HopperState, params: ModelParams,
                  extension_spring: LegSpring) -> tuple[HopperState, float]:
    """Flight-controller reset: lock the foot to the body at leg length ``lambda_c``.

    Center-of-mass position and velocity are preserved.  The returned loss
    is the kinetic energy of the relative motion plus whatever energy is left
    in the extension spring.
    """
    mu = params.mu
    com = state.com_position(mu)
    v = state.com_velocity(mu)
    lam = params.lambda_c
    post = HopperState(com + mu * lam / (1.0 + mu), com - lam / (1.0 + mu), v, v)
    relative = 0.5 * mu / (1.0 + mu) ** 2 * (state.v_b - state.v_f) ** 2
    return post, relative + extension_spring.energy(state)


# ---------------------------------------------------------------------------
# units


@dataclass(frozen=True)
class DimensionalSpec:
    body_mass: float
    foot_mass: float
    ground_stiffness: float
    leg_stiffness_c: float
    unloaded_leg_length: float
    gravity: float = 9.81

    def __post_init__(self):
        for name in ("body_mass", "ground_stiffness", "leg_stiffness_c",
                     "unloaded_leg_length", "gravity"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value!r}")
        if not (math.isfinite(self.foot_mass) and self.foot_mass >= 0):
            raise ValueError(f"foot_mass must be non-negative, got {self.foot_mass!r}")


@dataclass(frozen=True)
class Scales:
    mass: float
    length: float
    time: float
    energy: float
    force: float
    gravity: float


@dataclass(frozen=True)
class NondimResult:
    kappa_c: float
    mu: float
    lambda_c: float
    scales: Scales


def nondimensionalize(spec: DimensionalSpec) -> NondimResult:
    m_u = spec.body_mass + spec.foot_mass
    q_u = m_u * spec.gravity / spec.ground_stiffness
    t_u = math.sqrt(m_u / spec.ground_stiffness)
    scales = Scales(mass=m_u, length=q_u, time=t_u, energy=m_u * spec.gravity * q_u,
                    force=m_u * spec.gravity, gravity=spec.gravity)
    return NondimResult(
        kappa_c=spec.leg_stiffness_c / spec.ground_stiffness,
        mu=spec.foot_mass / spec.body_mass,
        lambda_c=spec.unloaded_leg_length / q_u,
        scales=scales,
    )


def dimensionalize(result: NondimResult) -> DimensionalSpec:
    s = result.scales
    k_g = s.mass / s.time ** 2
    body = s.mass / (1.0 + result.mu)
    return DimensionalSpec(
        body_mass=body,
        foot_mass=s.mass - body,
        ground_stiffness=k_g,
        leg_stiffness_c=result.kappa_c * k_g,
        unloaded_leg_length=result.lambda_c * s.length,
        gravity=s.gravity,
    )
