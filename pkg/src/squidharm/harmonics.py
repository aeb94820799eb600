"""Harmonic content of a junction from microscopic channels and from series inductance.

Decompositions use the convention U(phi) = -sum_n E_Jn cos(n phi), so a
conventional junction has E_J1 > 0 and E_J2 < 0.  The single-junction
potential of the main-model convention (-E_J1 cos phi + E_J2 cos 2phi)
carries the opposite sign on even entries; :func:`main_text_second_harmonic`
performs that conversion explicitly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.integrate
import scipy.optimize

from .errors import ConvergenceError, QuadratureError
from .potential import HarmonicPotential

FOURIER_GRID_POINTS = 4096
SERIES_VALIDITY_X = 0.25


@dataclass(frozen=True)
class TransparencyDistribution:
    """Channel transparencies of a tunnel junction, discrete or as a density.

    Either ``channels`` lists every transparency, or ``density`` gives a
    probability density rho(T) on (0, 1] together with the channel count.
    ``gap`` is the superconducting gap in GHz.
    """

    gap: float
    channels: tuple[float, ...] | None = None
    density: Callable[[float], float] | None = None
    n_channels: int | None = None

    def __post_init__(self):
        if self.gap <= 0.0 or not math.isfinite(self.gap):
            raise ValueError(f"gap must be positive and finite, got {self.gap}")
        if (self.channels is None) == (self.density is None):
            raise ValueError("provide exactly one of channels or density")
        if self.channels is not None:
            channels = tuple(float(t) for t in self.channels)
            if len(channels) < 1:
                raise ValueError("need at least one channel")
            if any(not (0.0 < t <= 1.0) for t in channels):
                raise ValueError("transparencies must lie in (0, 1]")
            object.__setattr__(self, "channels", channels)
        else:
            if self.n_channels is None or self.n_channels < 1:
                raise ValueError("density form requires n_channels >= 1")
            norm, err = scipy.integrate.quad(self.density, 0.0, 1.0, limit=200)
            if err > 1e-8 or abs(norm - 1.0) > 1e-6:
                raise ValueError(
                    f"density must be normalized to 1 over (0, 1]; integral = {norm}"
                )

    def moment(self, power: int) -> float:
        """sum_n T_n^power, as a channel sum or N * integral(rho T^power)."""
        if self.channels is not None:
            return float(np.sum(np.power(self.channels, power)))
        value, err = scipy.integrate.quad(
            lambda t: self.density(t) * t**power, 0.0, 1.0, limit=200, epsabs=1e-14, epsrel=1e-12
        )
        if err > 1e-10 * max(1.0, abs(value)):
            raise QuadratureError(
                f"transparency moment T^{power} integral error {err:.2e} too large"
            )
        return self.n_channels * value

    def average(self, func: Callable[[float], float]) -> float:
        """sum_n f(T_n), or N * integral(rho(T) f(T) dT) for a density."""
        if self.channels is not None:
            return float(sum(func(t) for t in self.channels))
        value, err = scipy.integrate.quad(
            lambda t: self.density(t) * func(t), 0.0, 1.0, limit=200, epsabs=1e-12, epsrel=1e-10
        )
        if err > 1e-8 * max(1.0, abs(value)):
            raise QuadratureError(f"channel-average integral error {err:.2e} too large")
        return self.n_channels * value


@dataclass(frozen=True)
class InductiveSeriesInput:
    """Junction + series-inductor pair for the power-series coefficients."""

    e_j: float
    e_l: float
    order: int = 7  # highest retained power of x = E_J/E_L

    def __post_init__(self):
        if self.e_l <= 0.0:
            raise ValueError("e_l must be positive")
        if self.e_j < 0.0:
            raise ValueError("e_j must be non-negative")
        if self.e_j / self.e_l >= 0.5:
            raise ValueError(
                f"E_J/E_L = {self.e_j / self.e_l:.3f} is outside the series sanity bound 0.5"
            )
        if self.order < 1:
            raise ValueError("order must be at least 1")

    @property
    def x(self) -> float:
        return self.e_j / self.e_l


@dataclass(frozen=True)
class HarmonicDecomposition:
    """Coefficients E_Jn (GHz) of U = -sum_n E_Jn cos(n phi), n = 1..n_max."""

    coefficients: tuple[float, ...]
    provenance: str

    def __post_init__(self):
        if len(self.coefficients) < 2:
            raise ValueError("decomposition must reach at least the second harmonic")
        if any(not math.isfinite(c) for c in self.coefficients):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))

    @property
    def n_max(self) -> int:
        return len(self.coefficients)

    def coefficient(self, n: int) -> float:
        """E_Jn for harmonic order n (1-indexed)."""
        return self.coefficients[n - 1]

    def ratio(self, n: int = 2) -> float:
        """E_Jn / E_J1."""
        return self.coefficients[n - 1] / self.coefficients[0]

    def to_potential(self) -> HarmonicPotential:
        """Convert to the signed cosine series (term coefficient = -E_Jn)."""
        return HarmonicPotential(
            [(n + 1, -c, 0.0) for n, c in enumerate(self.coefficients) if c != 0.0]
        )

    @classmethod
    def from_potential(
        cls, potential: HarmonicPotential, n_max: int, provenance: str = "converted"
    ) -> "HarmonicDecomposition":
        """Inverse of :meth:`to_potential`; requires all offsets to be zero."""
        coeffs = [0.0] * n_max
        for order, coeff, offset in potential.terms:
            if offset != 0.0:
                raise ValueError("decomposition requires all term offsets at zero")
            if order > n_max:
                raise ValueError(f"potential order {order} exceeds n_max = {n_max}")
            coeffs[order - 1] -= coeff
        return cls(tuple(coeffs), provenance)


def main_text_second_harmonic(decomposition: HarmonicDecomposition) -> float:
    """Second-harmonic coefficient in the +E_J2 cos(2 phi) sign convention."""
    return -decomposition.coefficient(2)


def andreev_series(dist: TransparencyDistribution, n_max: int = 3) -> HarmonicDecomposition:
    """Truncated transparency series for the lowest junction harmonics.

    Valid in the tunnel limit T << 1; each coefficient keeps the three
    leading powers of T.
    """
    if not 2 <= n_max <= 3:
        raise ValueError("the truncated series is tabulated for n_max in {2, 3}")
    s = {k: dist.moment(k) for k in range(1, 6)}
    d = dist.gap
    e1 = d * (s[1] / 4.0 + s[2] / 16.0 + 15.0 * s[3] / 512.0)
    e2 = -d * (s[2] / 64.0 + 3.0 * s[3] / 256.0 + 35.0 * s[4] / 4096.0)
    e3 = d * (s[3] / 512.0 + 5.0 * s[4] / 2048.0 + 315.0 * s[5] / 131072.0)
    coeffs = (e1, e2, e3)[:n_max]
    return HarmonicDecomposition(coeffs, provenance="andreev-series")


def _channel_coefficient(transparency: float, n: int) -> float:
    """-(1/pi) integral of u(phi) cos(n phi) for one channel with gap 1."""

    def integrand(phi):
        return -math.sqrt(1.0 - transparency * math.sin(phi / 2.0) ** 2) * math.cos(n * phi)

    value, err = scipy.integrate.quad(
        integrand, 0.0, 2.0 * math.pi, limit=400, epsabs=1e-13, epsrel=1e-12,
        points=[math.pi],
    )
    if err > 1e-10:
        raise QuadratureError(
            f"Fourier quadrature for harmonic {n} at T = {transparency} "
            f"reports error {err:.2e}"
        )
    return -value / math.pi


def andreev_exact(dist: TransparencyDistribution, n_max: int = 3) -> HarmonicDecomposition:
    """Harmonics from direct Fourier analysis of the channel potential.

    Serves as the oracle for :func:`andreev_series`: no small-T expansion,
    only quadrature of -gap * sqrt(1 - T sin^2(phi/2)) against cos(n phi).
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    coeffs = tuple(
        dist.gap * dist.average(lambda t, n=n: _channel_coefficient(t, n))
        for n in range(1, n_max + 1)
    )
    return HarmonicDecomposition(coeffs, provenance="andreev-oracle")


# {harmonic order: {power of x: coefficient}} for the junction + inductor series
_INDUCTIVE_TERMS = {
    1: {0: 1.0, 2: -1.0 / 8.0, 4: 1.0 / 192.0},
    2: {1: -1.0 / 4.0, 3: 1.0 / 12.0, 5: -1.0 / 96.0},
    3: {2: 1.0 / 8.0, 4: -9.0 / 128.0, 6: 1.0 / 64.0},
    4: {3: -1.0 / 12.0, 5: 1.0 / 15.0, 7: -101.0 / 4608.0},
}


def inductive_series(spec: InductiveSeriesInput, n_max: int = 4) -> HarmonicDecomposition:
    """Power series in x = E_J/E_L for the inductance-induced harmonics."""
    if not 2 <= n_max <= 4:
        raise ValueError("inductive series is tabulated for n_max in {2, 3, 4}")
    x = spec.x
    if x > SERIES_VALIDITY_X:
        warnings.warn(
            f"E_J/E_L = {x:.3f} exceeds {SERIES_VALIDITY_X}; series accuracy degrades",
            stacklevel=2,
        )
    coeffs = []
    for n in range(1, n_max + 1):
        total = sum(
            c * x**p for p, c in _INDUCTIVE_TERMS[n].items() if p <= spec.order
        )
        coeffs.append(spec.e_j * total)
    return HarmonicDecomposition(tuple(coeffs), provenance="inductive-series")


def _minimize_inductor_phase(
    phi: np.ndarray, e_j: float, e_l: float, beta: float
) -> np.ndarray:
    """Inductor phase minimizing the series potential at each total phase.

    The stationarity condition  E_L p = E_J [sin(phi - p) - 2 beta sin(2(phi - p))]
    has a unique root when E_J (1 + 4|beta|) < E_L; it is found by a
    safeguarded Newton iteration seeded at the first-order estimate
    (E_J/E_L) sin(phi), falling back to bisection per point if needed.
    """
    p = (e_j / e_l) * np.sin(phi)

    def residual(p_arr):
        return (
            e_l * p_arr
            - e_j * np.sin(phi - p_arr)
            + 2.0 * beta * e_j * np.sin(2.0 * (phi - p_arr))
        )

    def residual_prime(p_arr):
        return (
            e_l
            + e_j * np.cos(phi - p_arr)
            - 4.0 * beta * e_j * np.cos(2.0 * (phi - p_arr))
        )

    tol = 1e-13 * e_l * max(1.0, e_j / e_l)
    for _ in range(60):
        r = residual(p)
        if np.max(np.abs(r)) < tol:
            break
        p = p - r / residual_prime(p)
    else:
        # Newton stalled somewhere; the residual is monotone in p, so a
        # bracketed root find is guaranteed on the stalled points.
        bound = e_j * (1.0 + 2.0 * abs(beta)) / e_l + 1e-9
        for k in np.flatnonzero(np.abs(residual(p)) >= tol):
            def scalar_residual(q, k=k):
                return (
                    e_l * q
                    - e_j * math.sin(phi[k] - q)
                    + 2.0 * beta * e_j * math.sin(2.0 * (phi[k] - q))
                )

            p[k] = scipy.optimize.brentq(scalar_residual, -bound, bound, xtol=1e-14)
    return p


def reduction_oracle(
    e_j: float,
    e_l: float,
    beta: float = 0.0,
    n_max: int = 4,
    grid_points: int = FOURIER_GRID_POINTS,
) -> HarmonicDecomposition:
    """Exact harmonics of a junction (+ intrinsic cos 2phi term) behind an inductor.

    For every total phase on a uniform grid the inductor phase is optimized
    numerically (no series expansion), and the resulting effective potential
    is Fourier analyzed.  This is the oracle against which the truncated
    power series is validated.
    """
    if e_l <= 0.0:
        raise ValueError("e_l must be positive")
    if e_j < 0.0:
        raise ValueError("e_j must be non-negative")
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    if e_j == 0.0:
        return HarmonicDecomposition((0.0,) * n_max, provenance="reduction-oracle")
    if e_j * (1.0 + 4.0 * abs(beta)) >= e_l:
        raise ConvergenceError(
            "inductor-phase optimum is not unique for E_J/E_L >= 1 "
            f"(E_J = {e_j}, E_L = {e_l}, beta = {beta})",
            diagnostics={"x": e_j / e_l, "beta": beta},
        )

    phi = np.linspace(0.0, 2.0 * np.pi, grid_points, endpoint=False)
    p = _minimize_inductor_phase(phi, e_j, e_l, beta)
    u = (
        -e_j * (np.cos(phi - p) - beta * np.cos(2.0 * (phi - p)))
        + 0.5 * e_l * p**2
    )
    spectrum = np.fft.rfft(u) / grid_points
    # u is even in phi, so sine components must vanish
    if np.max(np.abs(spectrum[1 : n_max + 1].imag)) > 1e-10 * max(1.0, e_j):
        raise ConvergenceError("Fourier analysis produced spurious sine components")
    coeffs = tuple(-2.0 * float(spectrum[n].real) for n in range(1, n_max + 1))
    return HarmonicDecomposition(coeffs, provenance="reduction-oracle")


def effective_second_harmonic(e_j1: float, e_l: float, beta: float = 0.0) -> float:
    """Leading-order effective E_J2 (main-model sign): beta E_J1 + E_J1^2 / 4 E_L."""
    if e_l <= 0.0:
        raise ValueError("e_l must be positive")
    return beta * e_j1 + e_j1**2 / (4.0 * e_l)
