"""Closed-form flows of the stance domains.

Inside any one stance domain the equations of motion are linear with
constant coefficients, so the trajectory is a sum of at most two harmonic
modes around an equilibrium.  Flows evaluate that solution (and the
accelerations) either at a scalar time or on a numpy grid of times.
"""

from __future__ import annotations

import math

import numpy as np

from .model import HopperState, LegSpring

TWO_PI = 2.0 * math.pi


class StaticFlow:
    """Foot pinned at ``xi_f0``; the body oscillates on the leg spring."""

    def __init__(self, state: HopperState, spring: LegSpring, mu: float, body_bias: float = 0.0):
        self.xi_f0 = state.xi_f
        p = (1.0 + mu) * spring.stiffness
        self.w = math.sqrt(p)
        self.eq = spring.unloaded_length + state.xi_f + (body_bias - 1.0) / p
        self.a = state.xi_b - self.eq
        self.b = state.v_b / self.w
        self.period = TWO_PI / self.w

    def at(self, t: float) -> tuple[float, float, float, float]:
        c, s = math.cos(self.w * t), math.sin(self.w * t)
        x = self.a * c + self.b * s
        return (self.eq + x, self.xi_f0, self.w * (self.b * c - self.a * s), 0.0)

    def accel_at(self, t: float) -> tuple[float, float]:
        x = self.a * math.cos(self.w * t) + self.b * math.sin(self.w * t)
        return (-self.w * self.w * x, 0.0)

    def sample(self, ts: np.ndarray) -> np.ndarray:
        """Rows: xi_b, xi_f, v_b, v_f, a_b, a_f."""
        c, s = np.cos(self.w * ts), np.sin(self.w * ts)
        x = self.a * c + self.b * s
        out = np.empty((6, ts.size))
        out[0] = self.eq + x
        out[1] = self.xi_f0
        out[2] = self.w * (self.b * c - self.a * s)
        out[3] = 0.0
        out[4] = -self.w * self.w * x
        out[5] = 0.0
        return out


class YieldingFlow:
    """Body and foot both moving, the ground acting as a spring of unit stiffness.

    ``body_bias`` is an extra constant acceleration on the body (friction).
    """

    def __init__(self, state: HopperState, spring: LegSpring, mu: float, body_bias: float = 0.0):
        if not mu > 0:
            raise ValueError("yielding dynamics need a positive foot mass ratio")
        k, lam = spring.stiffness, spring.unloaded_length
        p = (1.0 + mu) * k
        q = (1.0 + mu) / mu
        cb = -1.0 + body_bias + p * lam
        cf = -1.0 - q * k * lam
        det = p * q
        self.eq_b = (q * (1.0 + k) * cb + p * cf) / det
        self.eq_f = (q * k * cb + p * cf) / det

        trace = p + q * (1.0 + k)
        root = math.sqrt((p - q * (1.0 + k)) ** 2 + 4.0 * p * q * k)
        w1sq = 0.5 * (trace + root)
        w2sq = det / w1sq
        self.w1, self.w2 = math.sqrt(w1sq), math.sqrt(w2sq)
        # mode shapes (body, foot) = (p, p - w^2)
        self.v1 = (p, p - w1sq)
        self.v2 = (p, p - w2sq)
        vdet = p * (w1sq - w2sq)

        def modal(eb, ef):
            return ((eb * (p - w2sq) - p * ef) / vdet, (p * ef - eb * (p - w1sq)) / vdet)

        self.a1, self.a2 = modal(state.xi_b - self.eq_b, state.xi_f - self.eq_f)
        b1, b2 = modal(state.v_b, state.v_f)
        self.b1, self.b2 = b1 / self.w1, b2 / self.w2
        self.period = TWO_PI / self.w1

    def at(self, t: float) -> tuple[float, float, float, float]:
        c1, s1 = math.cos(self.w1 * t), math.sin(self.w1 * t)
        c2, s2 = math.cos(self.w2 * t), math.sin(self.w2 * t)
        m1 = self.a1 * c1 + self.b1 * s1
        m2 = self.a2 * c2 + self.b2 * s2
        d1 = self.w1 * (self.b1 * c1 - self.a1 * s1)
        d2 = self.w2 * (self.b2 * c2 - self.a2 * s2)
        v1, v2 = self.v1, self.v2
        return (self.eq_b + v1[0] * m1 + v2[0] * m2,
                self.eq_f + v1[1] * m1 + v2[1] * m2,
                v1[0] * d1 + v2[0] * d2,
                v1[1] * d1 + v2[1] * d2)

    def accel_at(self, t: float) -> tuple[float, float]:
        m1 = -self.w1 ** 2 * (self.a1 * math.cos(self.w1 * t) + self.b1 * math.sin(self.w1 * t))
        m2 = -self.w2 ** 2 * (self.a2 * math.cos(self.w2 * t) + self.b2 * math.sin(self.w2 * t))
        return (self.v1[0] * m1 + self.v2[0] * m2, self.v1[1] * m1 + self.v2[1] * m2)

    def sample(self, ts: np.ndarray) -> np.ndarray:
        c1, s1 = np.cos(self.w1 * ts), np.sin(self.w1 * ts)
        c2, s2 = np.cos(self.w2 * ts), np.sin(self.w2 * ts)
        m1 = self.a1 * c1 + self.b1 * s1
        m2 = self.a2 * c2 + self.b2 * s2
        d1 = self.w1 * (self.b1 * c1 - self.a1 * s1)
        d2 = self.w2 * (self.b2 * c2 - self.a2 * s2)
        out = np.empty((6, ts.size))
        (v1b, v1f), (v2b, v2f) = self.v1, self.v2
        out[0] = self.eq_b + v1b * m1 + v2b * m2
        out[1] = self.eq_f + v1f * m1 + v2f * m2
        out[2] = v1b * d1 + v2b * d2
        out[3] = v1f * d1 + v2f * d2
        w1sq, w2sq = self.w1 ** 2, self.w2 ** 2
        out[4] = -(v1b * w1sq * m1 + v2b * w2sq * m2)
        out[5] = -(v1f * w1sq * m1 + v2f * w2sq * m2)
        return out
