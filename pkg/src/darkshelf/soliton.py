"""Exact dark/grey soliton profiles and core-parameter algebra.

The defocusing NLS kernel used throughout is the background-phase-removed
form

    i u_z - (1/2) u_tt + (|u|^2 - u_inf^2) u = eps F[u]

whose unperturbed soliton is u = (A + i B tanh(B (t - A z - t0))) e^{i sigma0}
with A^2 + B^2 = u_inf^2.  Two magnitude conventions coexist: grey profiles
use a positive magnitude q0 > 0, black profiles (A = 0) use the signed
representation q0 = u_inf tanh(.), which passes through zero.  Every routine
states which one it returns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quadrature import integrate, integrate_soliton_density

_REL_TOL = 1e-12


class InvalidParamsError(ValueError):
    """Core-parameter invariants violated."""


@dataclass(frozen=True)
class CoreParams:
    """Slowly varying soliton and background parameters.

    A is the soliton velocity (grey depth parameter), B the inverse width
    (darkness), t0 the position offset and sigma0 the soliton phase.
    delta_phi0 is the phase change across the core, delta_phi_inf the total
    phase change across the line (equal to delta_phi0 for a bare soliton).
    """

    u_inf: float
    A: float
    B: float
    t0: float = 0.0
    sigma0: float = 0.0
    delta_phi0: float = field(default=None)  # type: ignore[assignment]
    delta_phi_inf: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not (self.u_inf > 0 and np.isfinite(self.u_inf)):
            raise InvalidParamsError("u_inf must be positive and finite")
        if self.B < 0:
            raise InvalidParamsError("B must be non-negative")
        if abs(self.A) > self.u_inf * (1 + _REL_TOL):
            raise InvalidParamsError("|A| must not exceed u_inf")
        if abs(self.A**2 + self.B**2 - self.u_inf**2) > _REL_TOL * self.u_inf**2:
            raise InvalidParamsError("A^2 + B^2 = u_inf^2 violated beyond 1e-12")
        dphi = math.pi if self.A == 0.0 else 2.0 * math.atan2(self.B, self.A)
        if self.delta_phi0 is None:
            object.__setattr__(self, "delta_phi0", dphi)
        elif abs(self.delta_phi0 - dphi) > 1e-9:
            raise InvalidParamsError("delta_phi0 inconsistent with 2*atan2(B, A)")
        if self.delta_phi_inf is None:
            object.__setattr__(self, "delta_phi_inf", self.delta_phi0)

    @classmethod
    def from_background(
        cls, u_inf: float, delta_phi0: float, t0: float = 0.0, sigma0: float = 0.0
    ) -> "CoreParams":
        """Build params from the background magnitude and core phase change."""
        A, B = ab_from_background(u_inf, delta_phi0)
        return cls(u_inf=u_inf, A=A, B=B, t0=t0, sigma0=sigma0)

    @property
    def is_black(self) -> bool:
        return self.A == 0.0


@dataclass(frozen=True)
class Frame:
    """Coordinate-frame bookkeeping for sampled fields.

    ``accumulated_shift`` is the comoving origin int_0^z A ds + t0; it is 0 at
    z = 0 in the lab frame.
    """

    kind: str = "lab_t"  # "lab_t" or "comoving_T"
    accumulated_shift: float = 0.0


@dataclass(frozen=True)
class ConservedQuantities:
    """Hamiltonian, energy, momentum and center of energy of a dark pulse."""

    H: float
    E: float
    I: float
    R: float


def ab_from_background(u_inf: float, delta_phi0: float) -> tuple[float, float]:
    """(A, B) from the background magnitude and phase change across the core.

    A = u_inf cos(delta_phi0/2), B = u_inf sin(delta_phi0/2); the black limit
    delta_phi0 = pi returns exactly (0, u_inf).
    """
    if u_inf <= 0:
        raise ValueError("u_inf must be positive")
    if not 0.0 < delta_phi0 <= math.pi:
        raise ValueError("delta_phi0 must lie in (0, pi]")
    if delta_phi0 == math.pi:
        return 0.0, u_inf
    half = 0.5 * delta_phi0
    return u_inf * math.cos(half), u_inf * math.sin(half)


def grey_profile(params: CoreParams, T) -> np.ndarray | complex:
    """Unperturbed soliton field at comoving offset T.

    Grey solitons (A != 0) return q0 e^{i phi0} with q0 > 0; the black case
    returns the signed form u_inf tanh(B T) e^{i sigma0}.  Both equal
    (A + i B tanh(B T)) e^{i sigma0} up to the phase convention, and the
    black output is real up to the global phase (signed q0).
    """
    scalar = np.isscalar(T)
    T = np.asarray(T, dtype=float)
    if not np.all(np.isfinite(T)):
        raise ValueError("T must be finite")
    if params.B <= 0:
        raise InvalidParamsError("B must be positive (constant wave is degenerate)")
    tau = np.tanh(params.B * T)
    if params.is_black:
        out = params.u_inf * tau * np.exp(1j * params.sigma0)
    else:
        out = (params.A + 1j * params.B * tau) * np.exp(1j * params.sigma0)
    return complex(out) if scalar else out


def profile_with_derivatives(params: CoreParams, T):
    """(u0, u0_T, u0_TT) of the complex soliton form (A + iB tanh) e^{i sigma0}.

    This analytic representation is smooth for every A including the black
    limit and is the one fed to perturbation functionals inside quadratures.
    """
    T = np.asarray(T, dtype=float)
    B = params.B
    tau = np.tanh(B * T)
    sech2 = 1.0 / np.cosh(B * T) ** 2
    rot = np.exp(1j * params.sigma0)
    u0 = (params.A + 1j * B * tau) * rot
    u0_T = 1j * B**2 * sech2 * rot
    u0_TT = -2j * B**3 * sech2 * tau * rot
    return u0, u0_T, u0_TT


def soliton_invariants(params: CoreParams) -> ConservedQuantities:
    """Exact unperturbed values: E = 2B, I = -2AB, R = 2B t0, H by quadrature.

    H integrates the Hamiltonian density (1/2)|u_T|^2 + (1/2)(u_inf^2-q0^2)^2
    over the analytic profile; the closed form is (4/3)B^3.
    """
    B = params.B
    if B <= 0:
        raise InvalidParamsError("B must be positive")

    def density(T: np.ndarray) -> np.ndarray:
        _, u0_T, _ = profile_with_derivatives(params, T)
        q0sq = params.A**2 + B**2 * np.tanh(B * T) ** 2
        return 0.5 * np.abs(u0_T) ** 2 + 0.5 * (params.u_inf**2 - q0sq) ** 2

    H = integrate_soliton_density(density, B)
    return ConservedQuantities(H=H, E=2.0 * B, I=-2.0 * params.A * B, R=2.0 * B * params.t0)


def frame_transform(
    samples: np.ndarray,
    z: float,
    u_inf_history: Callable[[np.ndarray], np.ndarray] | float,
    direction: str,
) -> np.ndarray:
    """Map between the full field U and the background-phase-removed u.

    U = u exp(i int_0^z u_inf(s)^2 ds); ``direction`` is "U_to_u" or "u_to_U".
    ``u_inf_history`` is either a constant or a callable on [0, z].  The round
    trip is the identity to 1e-12.
    """
    if direction not in ("U_to_u", "u_to_U"):
        raise ValueError("direction must be 'U_to_u' or 'u_to_U'")
    if z < 0:
        raise ValueError("z must be non-negative")
    if z == 0:
        phase = 0.0
    elif callable(u_inf_history):
        phase = integrate(lambda s: np.asarray(u_inf_history(s)) ** 2, 0.0, z)
    else:
        phase = float(u_inf_history) ** 2 * z
    rot = np.exp(1j * phase if direction == "u_to_U" else -1j * phase)
    return np.asarray(samples) * rot
