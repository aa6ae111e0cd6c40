"""Closed-form hop-to-hop energy map of the massless-foot hopper.

With a massless foot the leg and ground act as springs in series during
compression, the body comes to rest at the compression-extension switch, and
the only loss is the plastic work done on the ground, ``0.5 * depth**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .model import ModelParams


class NoGaitError(ValueError):
    """The parameters admit no period-one gait (injection below the minimum)."""


@dataclass(frozen=True)
class MapCoefficients:
    a: float
    b: float
    c: float
    d: float
    kappa_eq_c: float
    phi_eff: float

    @classmethod
    def from_params(cls, params: ModelParams) -> "MapCoefficients":
        return coefficients(params.eps_inj, params.phi, params.kappa_c)

    def ratio(self, xi):
        """``(a*xi**3 + c*xi) / (b*xi**2 + d)``, whose square scales the loss."""
        return (self.a * xi ** 3 + self.c * xi) / (self.b * xi ** 2 + self.d)

    def ratio_slope(self, xi):
        num = self.a * xi ** 3 + self.c * xi
        den = self.b * xi ** 2 + self.d
        return ((3 * self.a * xi ** 2 + self.c) * den - num * 2 * self.b * xi) / den ** 2

    def cubic(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d])

    def discriminant(self) -> float:
        a, b, c, d = self.a, self.b, self.c, self.d
        return 18 * a * b * c * d - 4 * b ** 3 * d + b * b * c * c - 4 * a * c ** 3 - 27 * a * a * d * d


@dataclass(frozen=True)
class GaitAnalysis:
    fixed_point: float
    eigenvalue: float
    efficiency: float
    stability_margin: float
    globally_stable: bool


def coefficients(eps_inj: float, phi: float, kappa_c: float) -> MapCoefficients:
    pe = max(phi, 1.0)
    r = math.sqrt(2.0 * eps_inj)
    return MapCoefficients(
        a=kappa_c * pe * pe + 2.0 * pe - 1.0,
        b=(kappa_c * pe * pe + 1.0) * r,
        c=2.0 * eps_inj * kappa_c * (2.0 * pe - 1.0),
        d=2.0 * eps_inj * kappa_c * r,
        kappa_eq_c=kappa_c / (1.0 + kappa_c),
        phi_eff=pe,
    )


def pre_injection_depth(eps_td, kappa_c: float):
    """Foot position at the end of compression (negative; -2 when landing from rest)."""
    keq = kappa_c / (1.0 + kappa_c)
    return -(1.0 + np.sqrt(1.0 + 2.0 * keq * np.asarray(eps_td, dtype=float))) \
        if np.ndim(eps_td) else -(1.0 + math.sqrt(1.0 + 2.0 * keq * eps_td))


def depth_ratio(xi_f_minus, params: ModelParams):
    """Post- over pre-injection foot depth; one when the foot does not reyield."""
    pe, k, e = params.phi_eff, params.kappa_c, params.eps_inj
    x2 = xi_f_minus * xi_f_minus
    num = 2.0 * (2.0 * pe - 1.0) * e * k + (pe * pe * k + 2.0 * pe - 1.0) * x2
    den = 2.0 * e * k + (pe * pe * k + 1.0) * x2
    return num / den


def extension_equilibrium_depth(xi_f_minus: float, params: ModelParams) -> float:
    """Foot position where extension leg and ground forces balance (body frozen).

    Uses the massless-limit extension spring, so the result is independent of
    any finite-mass simulation.
    """
    k = params.kappa_c
    keq = k / (1.0 + k)
    force = -params.phi_eff * xi_f_minus
    d = -xi_f_minus / k
    work = 2.0 * params.eps_inj + k * d * d
    kappa_e = force * force / work
    u = work / force
    xi_b = params.lambda_c + xi_f_minus / keq
    lambda_e = u + xi_b - xi_f_minus
    return -kappa_e / (1.0 + kappa_e) * (lambda_e - xi_b)


def liftoff_margin(eps_td: float, params: ModelParams) -> float:
    """Leg force after the extension transient minus twice the body weight.

    The closed-form map assumes the extension spring unloads completely.
    Starting from rest, the body only reaches that point if the leg force
    exceeds twice its weight, so a negative margin means the body stalls in
    stance and the formula overstates the outcome.
    """
    k = params.kappa_c
    xi_m = pre_injection_depth(eps_td, k)
    force = -params.phi * xi_m
    d = -xi_m / k
    kappa_e = force * force / (2.0 * params.eps_inj + k * d * d)
    xi_p = depth_ratio(xi_m, params) * xi_m if params.eps_inj > 0 else xi_m
    return float(force + kappa_e * (xi_p - xi_m) - 2.0)


def energy_loss(eps_td, params: ModelParams):
    """Plastic ground work over one hop (``0.5 * xi_f(CE+)**2``)."""
    if params.eps_inj == 0:
        xi = pre_injection_depth(eps_td, params.kappa_c)
        return 0.5 * xi * xi
    co = MapCoefficients.from_params(params)
    xi = pre_injection_depth(eps_td, params.kappa_c)
    return params.eps_inj * co.ratio(xi) ** 2


def map_eval(eps_td, params: ModelParams):
    """Next-touchdown energy; negative values mean the hop fails."""
    return eps_td + params.eps_inj - energy_loss(eps_td, params)


def map_slope(eps_td, params: ModelParams):
    """Analytic derivative of ``map_eval`` with respect to touchdown energy."""
    keq = params.kappa_eq_c
    s = np.sqrt(1.0 + 2.0 * keq * np.asarray(eps_td, dtype=float))
    xi = -(1.0 + s)
    dxi = -keq / s
    if params.eps_inj == 0:
        out = 1.0 - xi * dxi
    else:
        co = MapCoefficients.from_params(params)
        out = 1.0 - 2.0 * params.eps_inj * co.ratio(xi) * co.ratio_slope(xi) * dxi
    return out if np.ndim(eps_td) else float(out)


def eps_from_depth(xi, kappa_c: float):
    """Inverse of ``pre_injection_depth``."""
    keq = kappa_c / (1.0 + kappa_c)
    return (xi * xi + 2.0 * xi) / (2.0 * keq)


def _polish(coeffs: np.ndarray, x: float, iters: int = 8) -> float:
    p = np.poly1d(coeffs)
    dp = p.deriv()
    for _ in range(iters):
        fx = p(x)
        slope = dp(x)
        if slope == 0:
            break
        step = fx / slope
        x -= step
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            break
    return float(x)


def cubic_real_root(co: MapCoefficients) -> float:
    """The single real root of ``a x^3 + b x^2 + c x + d`` (negative discriminant required)."""
    if not co.discriminant() < 0:
        raise ArithmeticError(f"cubic has {co.discriminant():.3g} >= 0 discriminant; real root not unique")
    roots = np.roots(co.cubic())
    real = roots[np.argmin(np.abs(roots.imag))].real
    return _polish(co.cubic(), real)


def fixed_point(params: ModelParams) -> float:
    """Unique period-one touchdown energy of the massless map."""
    if params.eps_inj <= 0:
        raise NoGaitError("no injected energy")
    co = MapCoefficients.from_params(params)
    xi = cubic_real_root(co)
    if xi > -2.0:
        raise NoGaitError(
            f"eps_inj={params.eps_inj} is below the minimum "
            f"{min_injected_energy(params.phi, params.kappa_c):.6g} for phi={params.phi}, kappa_c={params.kappa_c}")
    return float(eps_from_depth(xi, params.kappa_c))


def eigenvalue(params: ModelParams, eps_star: float | None = None) -> float:
    if eps_star is None:
        eps_star = fixed_point(params)
    return map_slope(eps_star, params)


def min_injected_energy(phi: float, kappa_c: float) -> float:
    """Smallest injected energy for which a gait exists.

    For ``phi <= 1`` this is exactly 2.  Otherwise it is the injection at which
    landing from rest returns exactly zero energy: with ``r = sqrt(2 eps_inj)``
    the boundary ``8a + 2c = 4b + d`` is the cubic
    ``-k r^3 + 2k(2p-1) r^2 - 4(k p^2 + 1) r + 8(k p^2 + 2p - 1) = 0``.
    """
    if not (phi > 0 and kappa_c > 0):
        raise ValueError("phi and kappa_c must be positive")
    if phi <= 1.0:
        return 2.0
    k, p = kappa_c, phi
    poly = np.array([-k, 2 * k * (2 * p - 1), -4 * (k * p * p + 1), 8 * (k * p * p + 2 * p - 1)])
    roots = np.roots(poly)
    real = [r.real for r in roots if abs(r.imag) <= 1e-9 * max(1.0, abs(r)) and r.real > 0]
    r = _polish(poly, max(real))
    # the sign change must be genuine: viable above, not viable just below
    g = np.poly1d(poly)
    if not (g(r * (1 + 1e-6)) < 0 < g(r * (1 - 1e-6))):
        r = brentq(g, 1e-9, max(real) * 2 + 10, xtol=1e-14)
    return 0.5 * r * r


def critical_points(params: ModelParams) -> np.ndarray:
    """Touchdown energies where the map slope vanishes, in increasing order.

    In terms of the depth ``xi`` the slope is zero where
    ``s * den**3 + 2 eps_inj keq * num * (num' den - num den')`` vanishes,
    with ``s = -1 - xi``, ``num = a xi^3 + c xi`` and ``den = b xi^2 + d``.
    Only roots with ``xi < -2`` (positive touchdown energy) count.
    """
    if params.eps_inj == 0:
        return np.empty(0)
    co = MapCoefficients.from_params(params)
    P = np.polynomial.Polynomial
    num = P([0.0, co.c, 0.0, co.a])
    den = P([co.d, 0.0, co.b])
    poly = P([-1.0, -1.0]) * den ** 3 \
        + 2.0 * params.eps_inj * co.kappa_eq_c * num * (num.deriv() * den - num * den.deriv())
    roots = poly.roots()
    scale = np.abs(roots) + 1.0
    xi = np.sort(roots[(np.abs(roots.imag) <= 1e-9 * scale) & (roots.real < -2.0)].real)[::-1]
    eps = eps_from_depth(xi, params.kappa_c)
    # polish each root on the analytic slope
    out = []
    for e in eps:
        lo, hi = e * (1 - 1e-6) - 1e-12, e * (1 + 1e-6) + 1e-12
        if map_slope(max(lo, 0.0), params) * map_slope(hi, params) < 0:
            e = brentq(lambda x: map_slope(x, params), max(lo, 0.0), hi, xtol=1e-14, rtol=1e-15)
        out.append(float(e))
    return np.array(out)


def map_minimum(params: ModelParams, upper: float | None = None) -> tuple[float, float]:
    """Location and value of the global minimum of the map on ``[0, inf)``.

    Candidates are zero and every critical point.  For moderate force ratios
    (``phi`` up to about 3) the map decreases then increases, so there is at
    most one critical point; larger ratios can produce several.
    """
    cands = [0.0] + [e for e in critical_points(params) if upper is None or e <= upper]
    vals = [float(map_eval(e, params)) for e in cands]
    i = int(np.argmin(vals))
    return float(cands[i]), vals[i]


def gait_metrics(params: ModelParams) -> GaitAnalysis:
    eps = fixed_point(params)
    lam = eigenvalue(params, eps)
    eta = eps / (params.eps_inj + eps)
    alpha = 1.0 - lam * lam if -1.0 <= lam <= 1.0 else 0.0
    if lam >= 0 and len(critical_points(params)) <= 1:
        # on the increasing branch every orbit stays above the map minimum
        glob = True
    else:
        glob = abs(lam) < 1.0 and map_minimum(params)[1] > 0
    return GaitAnalysis(eps, lam, eta, alpha, glob)
