"""Airy similarity layers at the shelf edges and shelf-edge kinematics.

Each edge of the shelf moves at the instantaneous long-wave speed +-u_inf
and carries a transition layer obeying 2 V w_{zeta x} = (1/4) w_{xxxx}.
In the similarity variable xi = a x / zeta^(1/3) with a = -2 (V/3)^(1/3)
(real signed cube root) the magnitude step is an Airy integral and the
phase is its second antiderivative.  The orientation (outer side -> 0,
shelf side -> plateau) comes out of the sign of a automatically: dispersive
ripples run ahead of the edge, on the outer side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .airy import airy_ai_double_integral, airy_ai_integral

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class LayerProfile:
    """One moving transition layer.

    ``amplitude`` is the shelf-side value the layer matches: q1 of the
    adjacent plateau for magnitude layers, phi1t for phase layers.  ``x`` in
    the evaluators is measured from the instantaneous edge position
    (comoving T - S_side, equivalently lab t - V*zeta), positive toward +t.
    """

    side: str
    V: float
    amplitude: float
    a: float

    @classmethod
    def at_edge(cls, side: str, u_inf: float, amplitude: float) -> "LayerProfile":
        if side not in (LEFT, RIGHT):
            raise ValueError("side must be 'left' or 'right'")
        if u_inf <= 0:
            raise ValueError("u_inf must be positive")
        V = u_inf if side == RIGHT else -u_inf
        a = -2.0 * math.copysign(abs(V / 3.0) ** (1.0 / 3.0), V)
        return cls(side=side, V=V, amplitude=amplitude, a=a)


def similarity_variable(layer: LayerProfile, zeta: float, x) -> np.ndarray:
    if zeta <= 0:
        raise ValueError("zeta must be positive")
    return layer.a * np.asarray(x, dtype=float) / zeta ** (1.0 / 3.0)


def shelf_magnitude_profile(layer: LayerProfile, zeta: float, x):
    """Layer magnitude correction w(zeta, x) = q1_side * AiI(a x / zeta^(1/3)).

    w tends to the plateau value on the shelf side and to 0 on the outer
    side; the first-order field magnitude near the edge is u_inf + eps*w.
    """
    return layer.amplitude * airy_ai_integral(similarity_variable(layer, zeta, x))


def shelf_phase_profile(layer: LayerProfile, zeta: float, x):
    """Layer phase correction theta(zeta, x).

    The double Airy integral, scaled so the slope d theta/dx tends to the
    plateau value phi1t_side on the shelf side while theta -> 0 outside.
    """
    xi = similarity_variable(layer, zeta, x)
    scale = zeta ** (1.0 / 3.0) / layer.a
    return layer.amplitude * scale * airy_ai_double_integral(xi)


def shelf_edges(z_samples: np.ndarray, u_inf: np.ndarray, A: np.ndarray, zeta: float) -> tuple[float, float]:
    """Comoving shelf-edge positions (S_L, S_R) at propagation distance zeta.

    S_L = -int_0^zeta (u_inf + A) ds and S_R = int_0^zeta (u_inf - A) ds,
    accumulated by the trapezoid rule on the sampled histories.  Always
    S_L < 0 < S_R for B > 0.
    """
    z_samples = np.asarray(z_samples, dtype=float)
    u_inf = np.asarray(u_inf, dtype=float)
    A = np.asarray(A, dtype=float)
    if zeta < 0 or zeta > z_samples[-1] + 1e-12:
        raise ValueError(f"trajectory covers [0, {z_samples[-1]}], not zeta={zeta}")
    if zeta == 0:
        return 0.0, 0.0
    grid = np.append(z_samples[z_samples < zeta], zeta)
    up = np.interp(grid, z_samples, u_inf)
    ap = np.interp(grid, z_samples, A)
    s_l = -float(np.trapezoid(up + ap, grid))
    s_r = float(np.trapezoid(up - ap, grid))
    return s_l, s_r


def dispersion_omega(k, u_inf: float):
    """Layer dispersion relation omega(k) = sqrt(u_inf^2 k^2 + k^4/4) >= 0."""
    if u_inf <= 0:
        raise ValueError("u_inf must be positive")
    k = np.asarray(k, dtype=float)
    out = np.sqrt(u_inf**2 * k**2 + 0.25 * k**4)
    return float(out) if out.ndim == 0 else out


def dispersion_phase_speed(k, u_inf: float):
    """Phase speed omega/k; tends to the edge speed u_inf as k -> 0."""
    k = np.asarray(k, dtype=float)
    out = np.where(k == 0.0, u_inf, dispersion_omega(np.where(k == 0, 1.0, k), u_inf) / np.where(k == 0, 1.0, np.abs(k)))
    return float(out) if out.ndim == 0 else out
