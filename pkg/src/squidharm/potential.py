"""Cosine-series potentials and the SQUID parameterization.

A potential is a signed cosine series

    U(phi) = sum_k  c_k * cos(n_k * (phi - delta_k)),

with integer orders n_k >= 1, coefficients c_k in GHz and per-term phase
offsets delta_k in radians.  The empty series is the free rotor U = 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(frozen=True)
class HarmonicPotential:
    """Signed cosine series with per-term phase offsets.

    Terms with identical ``(order, offset)`` are combined on construction and
    exact-zero coefficients are dropped.  Terms of equal order at different
    offsets are kept separate; use :meth:`canonical` to combine them
    trigonometrically into at most one term per order.
    """

    terms: tuple[tuple[int, float, float], ...]

    def __init__(self, terms=()):
        cleaned: dict[tuple[int, float], float] = {}
        for order, coeff, offset in terms:
            if order != int(order) or order < 1:
                raise ValueError(f"harmonic order must be a positive integer, got {order}")
            coeff = float(coeff)
            offset = float(offset)
            if not (math.isfinite(coeff) and math.isfinite(offset)):
                raise ValueError("potential terms must be finite")
            key = (int(order), offset)
            cleaned[key] = cleaned.get(key, 0.0) + coeff
        kept = tuple(
            (order, coeff, offset)
            for (order, offset), coeff in sorted(cleaned.items())
            if coeff != 0.0
        )
        object.__setattr__(self, "terms", kept)

    @property
    def max_order(self) -> int:
        return max((order for order, _, _ in self.terms), default=0)

    def merge(self, other: "HarmonicPotential") -> "HarmonicPotential":
        """Sum of two potentials, trig-combined to one term per order."""
        return HarmonicPotential(self.terms + other.terms).canonical()

    __add__ = merge

    def canonical(self, tol: float = 1e-12) -> "HarmonicPotential":
        """Combine equal-order terms into a single (amplitude, offset) pair.

        c1*cos(n(phi-d1)) + c2*cos(n(phi-d2)) = Re[(c1 e^{-i n d1} + c2 e^{-i n d2}) e^{i n phi}],
        so each order reduces to one term with amplitude |z| and offset
        -arg(z)/n.  Amplitudes below ``tol`` times the largest input
        coefficient are treated as exact cancellations and dropped.
        """
        if not self.terms:
            return self
        scale = max(abs(c) for _, c, _ in self.terms)
        amplitudes: dict[int, complex] = {}
        for order, coeff, offset in self.terms:
            amplitudes[order] = amplitudes.get(order, 0.0) + coeff * cmath.exp(-1j * order * offset)
        combined = []
        for order, z in sorted(amplitudes.items()):
            if abs(z) <= tol * scale:
                continue
            combined.append((order, abs(z), -cmath.phase(z) / order))
        return HarmonicPotential(combined)

    def evaluate(self, phi) -> np.ndarray:
        """Sample U(phi) on a scalar or array of phases (GHz)."""
        phi = np.asarray(phi, dtype=float)
        u = np.zeros_like(phi)
        for order, coeff, offset in self.terms:
            u += coeff * np.cos(order * (phi - offset))
        return u

    def derivative(self, phi) -> np.ndarray:
        """dU/dphi sampled on a grid (GHz per radian)."""
        phi = np.asarray(phi, dtype=float)
        du = np.zeros_like(phi)
        for order, coeff, offset in self.terms:
            du -= coeff * order * np.sin(order * (phi - offset))
        return du


@dataclass(frozen=True)
class SquidParams:
    """Fit parameterization of the capacitively shunted SQUID.

    Parameters
    ----------
    e_c:
        Charging energy E_C in GHz.
    e_j1_left:
        Fundamental Josephson energy of the left arm in GHz.
    d_ej:
        Junction asymmetry; the right arm has E_J1 * (1 - d_ej).
    alpha:
        Shared second-to-first harmonic ratio for both arms (signed).
    n_g:
        Gate charge in Cooper pairs.
    phi_ext:
        Reduced external flux in radians (2 pi * Phi_ext / Phi_0).
    alpha_right_corrected:
        When True the right arm uses alpha * (1 - d_ej) instead of the
        shared alpha (first-order inductive correction, assuming no
        intrinsic second harmonic).  Off by default.
    """

    e_c: float
    e_j1_left: float
    d_ej: float = 0.0
    alpha: float = 0.0
    n_g: float = 0.0
    phi_ext: float = 0.0
    alpha_right_corrected: bool = field(default=False)

    def __post_init__(self):
        for name in ("e_c", "e_j1_left", "d_ej", "alpha", "n_g", "phi_ext"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.e_c <= 0.0:
            raise ValueError(f"e_c must be positive, got {self.e_c}")
        if self.e_j1_left < 0.0:
            raise ValueError(f"e_j1_left must be non-negative, got {self.e_j1_left}")
        if abs(self.d_ej) >= 1.0:
            raise ValueError(f"|d_ej| must be below 1, got {self.d_ej}")
        if abs(self.alpha) >= 0.25:
            raise ValueError(f"|alpha| = {abs(self.alpha)} exceeds the series-validity bound 0.25")

    @property
    def e_j1_right(self) -> float:
        return self.e_j1_left * (1.0 - self.d_ej)

    @property
    def e_j1_sum(self) -> float:
        return self.e_j1_left + self.e_j1_right

    @property
    def delta_ej1(self) -> float:
        """Difference of fundamental harmonics between the arms (GHz)."""
        return self.e_j1_left - self.e_j1_right

    @property
    def sigma_ej2(self) -> float:
        """Sum of the second harmonics of the two arms (GHz)."""
        alpha_right = self.alpha * (1.0 - self.d_ej) if self.alpha_right_corrected else self.alpha
        return self.alpha * self.e_j1_left + alpha_right * self.e_j1_right

    def with_flux(self, phi_ext: float) -> "SquidParams":
        return replace(self, phi_ext=phi_ext)

    def with_gate_charge(self, n_g: float) -> "SquidParams":
        return replace(self, n_g=n_g)


def build_squid_potential(params: SquidParams) -> HarmonicPotential:
    """SQUID potential as a four-term cosine series.

    Left arm at offset 0, right arm at offset phi_ext; the fundamental enters
    with coefficient -E_J1 and the second harmonic with +alpha * E_J1, the
    order-2 offsets acting as cos(2 (phi - phi_ext)).  At half flux the
    series trig-combines to -dE_J1 cos(phi) + sum(E_J2) cos(2 phi).
    """
    alpha_left = params.alpha
    alpha_right = params.alpha * (1.0 - params.d_ej) if params.alpha_right_corrected else params.alpha
    return HarmonicPotential(
        [
            (1, -params.e_j1_left, 0.0),
            (1, -params.e_j1_right, params.phi_ext),
            (2, alpha_left * params.e_j1_left, 0.0),
            (2, alpha_right * params.e_j1_right, params.phi_ext),
        ]
    )


def half_flux_potential(delta_ej1: float, sigma_ej2: float) -> HarmonicPotential:
    """The exactly-half-flux form -dE_J1 cos(phi) + sum(E_J2) cos(2 phi)."""
    return HarmonicPotential([(1, -delta_ej1, 0.0), (2, sigma_ej2, 0.0)])


def count_wells(potential: HarmonicPotential, grid_points: int = 4096) -> int:
    """Number of local minima of U over one 2 pi period (periodic grid)."""
    phi = np.linspace(0.0, 2.0 * np.pi, grid_points, endpoint=False)
    u = potential.evaluate(phi)
    left = np.roll(u, 1)
    right = np.roll(u, -1)
    return int(np.count_nonzero((u < left) & (u < right)))
