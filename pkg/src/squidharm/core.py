"""Charge-basis Hamiltonians, eigensolution, and flux-swept transition spectra.

Convention fixed globally: e^{i phi_hat} |n> = |n + 1>, so a potential term
c * cos(k (phi - delta)) places (c/2) e^{-i k delta} on the (n + k, n) band
plus the conjugate band.  Energies are E/h in GHz throughout.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import CutoffError, NonHermitianError, SolverError
from .potential import HarmonicPotential, SquidParams, build_squid_potential

# Eigensolver / invariant tolerances (relative)
HERMITICITY_RTOL = 1e-12
ORTHONORMALITY_TOL = 1e-10
RESIDUAL_RTOL = 1e-8
CUTOFF_CONVERGENCE_GHZ = 1e-6


@dataclass(frozen=True)
class ChargeBasisSpec:
    """Truncated Cooper-pair number basis |n>, n = -cutoff .. +cutoff."""

    cutoff: int
    converged: bool = False

    def __post_init__(self):
        if self.cutoff < 0 or self.cutoff != int(self.cutoff):
            raise ValueError(f"cutoff must be a non-negative integer, got {self.cutoff}")

    @property
    def dimension(self) -> int:
        return 2 * self.cutoff + 1

    @property
    def charges(self) -> np.ndarray:
        return np.arange(-self.cutoff, self.cutoff + 1)


@dataclass(frozen=True)
class EigenSystem:
    """Lowest eigenpairs of a charge-basis Hamiltonian.

    ``energies`` are ascending in GHz; ``states`` holds the matching column
    eigenvectors in the charge basis.
    """

    energies: np.ndarray
    states: np.ndarray
    params: SquidParams | None = None
    basis: ChargeBasisSpec | None = None

    def transition(self, i: int, j: int = 0) -> float:
        """omega_ij = E_i - E_j in GHz."""
        return float(self.energies[i] - self.energies[j])


def charge_cutoff(params: SquidParams) -> int:
    """Default charge cutoff: max(24, ceil(4 sqrt(E_J_sum / E_C))).

    Wavefunction support in charge grows with (E_J/E_C)^(1/4); the square
    root makes the rule safe up to E_J/E_C of a few thousand.
    """
    ratio = params.e_j1_sum / params.e_c
    if ratio <= 0.0:
        return 24
    return max(24, math.ceil(4.0 * math.sqrt(ratio)))


def hamiltonian_banded(
    potential: HarmonicPotential, e_c: float, n_g: float, basis: ChargeBasisSpec
) -> np.ndarray:
    """Lower band storage of the charge-basis Hamiltonian.

    Row k holds the k-th subdiagonal: band[k, i] = H[i + k, i].
    """
    max_order = potential.max_order
    dim = basis.dimension
    if dim < 2 * max_order + 1:
        raise CutoffError(
            f"basis dimension {dim} cannot host harmonic order {max_order}; "
            f"need at least {2 * max_order + 1}"
        )
    band = np.zeros((max_order + 1, dim), dtype=complex)
    n = basis.charges
    band[0] = 4.0 * e_c * (n - n_g) ** 2
    for order, coeff, offset in potential.terms:
        band[order, : dim - order] += 0.5 * coeff * np.exp(-1j * order * offset)
    return band


def hamiltonian_matrix(
    potential: HarmonicPotential, e_c: float, n_g: float, basis: ChargeBasisSpec
) -> np.ndarray:
    """Dense self-adjoint charge-basis Hamiltonian (GHz)."""
    band = hamiltonian_banded(potential, e_c, n_g, basis)
    dim = basis.dimension
    h = np.zeros((dim, dim), dtype=complex)
    h[np.diag_indices(dim)] = band[0]
    for order in range(1, band.shape[0]):
        idx = np.arange(dim - order)
        h[idx + order, idx] = band[order, : dim - order]
        h[idx, idx + order] = np.conj(band[order, : dim - order])
    return h


def _band_matvec(band: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Apply the banded Hermitian matrix to column vectors."""
    out = band[0][:, None] * vectors
    for order in range(1, band.shape[0]):
        sub = band[order, : band.shape[1] - order][:, None]
        out[order:] += sub * vectors[:-order]
        out[:-order] += np.conj(sub) * vectors[order:]
    return out


def _fix_phase(states: np.ndarray) -> np.ndarray:
    """Deterministic gauge: largest-magnitude component made real positive."""
    idx = np.argmax(np.abs(states), axis=0)
    pivots = states[idx, np.arange(states.shape[1])]
    phases = np.where(np.abs(pivots) > 0, pivots / np.abs(pivots), 1.0)
    return states / phases[None, :]


def _check_eigenpairs(band: np.ndarray, energies: np.ndarray, states: np.ndarray) -> None:
    overlap = states.conj().T @ states
    if np.max(np.abs(overlap - np.eye(states.shape[1]))) > ORTHONORMALITY_TOL:
        raise SolverError("eigenvectors lost orthonormality beyond 1e-10")
    scale = np.max(np.abs(band))
    residual = _band_matvec(band, states) - energies[None, :] * states
    if scale > 0 and np.max(np.abs(residual)) > RESIDUAL_RTOL * scale:
        raise SolverError(
            f"eigenpair residual {np.max(np.abs(residual)):.3e} exceeds "
            f"{RESIDUAL_RTOL:.0e} * |H| = {RESIDUAL_RTOL * scale:.3e}"
        )


def eigenvalues_banded(band: np.ndarray, levels: int) -> np.ndarray:
    """Lowest ``levels`` eigenvalues from lower band storage (no vectors).

    Bisection on the banded form; this is the hot path for flux sweeps and
    fit cost evaluations.
    """
    dim = band.shape[1]
    if levels > dim:
        raise ValueError(f"requested {levels} levels from dimension {dim}")
    try:
        energies = scipy.linalg.eig_banded(
            band,
            lower=True,
            select="i",
            select_range=(0, levels - 1),
            eigvals_only=True,
            check_finite=False,
        )
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise SolverError(f"banded eigensolver failed: {exc}") from exc
    return np.sort(energies)


def eigensolve_banded(
    band: np.ndarray,
    levels: int,
    params: SquidParams | None = None,
    basis: ChargeBasisSpec | None = None,
) -> EigenSystem:
    """Lowest ``levels`` eigenpairs from lower band storage."""
    dim = band.shape[1]
    if levels > dim:
        raise ValueError(f"requested {levels} levels from dimension {dim}")
    try:
        energies, states = scipy.linalg.eig_banded(
            band, lower=True, select="i", select_range=(0, levels - 1), check_finite=False
        )
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise SolverError(f"banded eigensolver failed: {exc}") from exc
    order = np.argsort(energies, kind="stable")
    energies = np.ascontiguousarray(energies[order])
    states = _fix_phase(np.ascontiguousarray(states[:, order]))
    _check_eigenpairs(band, energies, states)
    return EigenSystem(energies=energies, states=states, params=params, basis=basis)


def eigensolve(h: np.ndarray, levels: int) -> EigenSystem:
    """Lowest ``levels`` eigenpairs of a dense self-adjoint matrix.

    Rejects non-Hermitian input (relative tolerance 1e-12); output ordering
    is ascending with ties broken by LAPACK's stable index order, and the
    eigenvector gauge is fixed so identical input reproduces identical
    output.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("expected a square matrix")
    if levels > h.shape[0]:
        raise ValueError(f"requested {levels} levels from dimension {h.shape[0]}")
    scale = np.max(np.abs(h)) or 1.0
    if np.max(np.abs(h - h.conj().T)) > HERMITICITY_RTOL * scale:
        raise NonHermitianError("matrix is not self-adjoint to 1e-12 relative")
    try:
        energies, states = scipy.linalg.eigh(
            h, subset_by_index=(0, levels - 1), check_finite=False
        )
    except scipy.linalg.LinAlgError as exc:
        raise SolverError(f"dense eigensolver failed: {exc}") from exc
    order = np.argsort(energies, kind="stable")
    energies = np.ascontiguousarray(energies[order])
    states = _fix_phase(np.ascontiguousarray(states[:, order]))
    overlap = states.conj().T @ states
    if np.max(np.abs(overlap - np.eye(levels))) > ORTHONORMALITY_TOL:
        raise SolverError("eigenvectors lost orthonormality beyond 1e-10")
    residual = h @ states - energies[None, :] * states
    if np.max(np.abs(residual)) > RESIDUAL_RTOL * scale:
        raise SolverError("eigenpair residual exceeds 1e-8 * |H|")
    return EigenSystem(energies=energies, states=states)


def squid_eigensystem(
    params: SquidParams, levels: int, basis: ChargeBasisSpec | None = None
) -> EigenSystem:
    """Diagonalize the SQUID at its stored flux and gate charge."""
    if basis is None:
        basis = ChargeBasisSpec(charge_cutoff(params))
    potential = build_squid_potential(params)
    band = hamiltonian_banded(potential, params.e_c, params.n_g, basis)
    return eigensolve_banded(band, levels, params=params, basis=basis)


def squid_energies(
    params: SquidParams, levels: int, basis: ChargeBasisSpec | None = None
) -> np.ndarray:
    """Lowest eigenvalues of the SQUID (GHz), without eigenvectors."""
    if basis is None:
        basis = ChargeBasisSpec(charge_cutoff(params))
    potential = build_squid_potential(params)
    band = hamiltonian_banded(potential, params.e_c, params.n_g, basis)
    return eigenvalues_banded(band, levels)


def converged_basis(
    params: SquidParams,
    levels: int,
    tol_ghz: float = CUTOFF_CONVERGENCE_GHZ,
    max_doublings: int = 3,
) -> ChargeBasisSpec:
    """Double the rule-based cutoff until requested transitions move < tol.

    The convergence flag is set only once a doubling changes every reported
    omega_i0 by less than ``tol_ghz``.
    """
    cutoff = charge_cutoff(params)
    current = _transitions_at(params, levels, cutoff)
    for _ in range(max_doublings):
        doubled = _transitions_at(params, levels, 2 * cutoff)
        if np.max(np.abs(doubled - current)) < tol_ghz:
            return ChargeBasisSpec(cutoff, converged=True)
        cutoff *= 2
        current = doubled
    return ChargeBasisSpec(cutoff, converged=False)


def _transitions_at(params: SquidParams, levels: int, cutoff: int) -> np.ndarray:
    energies = squid_energies(params, levels, ChargeBasisSpec(cutoff))
    return energies[1:] - energies[0]


@dataclass(frozen=True)
class Spectrum:
    """Transition table over a flux grid and a set of gate charges.

    ``energies[f, g, m]`` is the m-th eigenvalue at flux point f and gate
    charge g.  Transitions are derived as omega_ij = E_i - E_j for source
    levels j in {0, 1}.
    """

    flux: np.ndarray  # in Phi_0
    n_g: tuple[float, ...]
    energies: np.ndarray  # (n_flux, n_gate, levels)
    basis: ChargeBasisSpec
    metadata: dict = field(default_factory=dict)

    @property
    def levels(self) -> int:
        return self.energies.shape[2]

    def omega(self, i: int, j: int = 0) -> np.ndarray:
        """omega_ij over the grid, shape (n_flux, n_gate)."""
        return self.energies[:, :, i] - self.energies[:, :, j]

    def rows(self):
        """Yield (flux, n_g, i, j, omega) for j in {0, 1}, i > j."""
        for f_idx, flux in enumerate(self.flux):
            for g_idx, gate in enumerate(self.n_g):
                for j in (0, 1):
                    for i in range(j + 1, self.levels):
                        omega = float(self.energies[f_idx, g_idx, i] - self.energies[f_idx, g_idx, j])
                        yield float(flux), float(gate), i, j, omega


def transition_spectrum(
    params: SquidParams,
    flux_grid,
    n_g_values=(0.0,),
    levels: int = 4,
    basis: ChargeBasisSpec | None = None,
    check_convergence: bool = False,
    threads: int = 1,
) -> Spectrum:
    """Sweep external flux (in Phi_0) and tabulate transition frequencies.

    Grid points are independent work items; with ``threads > 1`` they are
    solved on a thread pool (LAPACK releases the GIL) and reassembled in
    grid order.  The flux stored in ``params`` is ignored.
    """
    flux_grid = np.atleast_1d(np.asarray(flux_grid, dtype=float))
    if flux_grid.size == 0:
        raise ValueError("flux grid must be non-empty")
    if levels < 2:
        raise ValueError("need at least 2 levels for a transition")
    n_g_values = tuple(float(g) for g in n_g_values)

    if basis is None:
        if check_convergence:
            basis = converged_basis(params.with_flux(0.0), levels)
        else:
            basis = ChargeBasisSpec(charge_cutoff(params))

    points = [
        (f_idx, g_idx, flux, gate)
        for f_idx, flux in enumerate(flux_grid)
        for g_idx, gate in enumerate(n_g_values)
    ]

    def solve(point):
        f_idx, g_idx, flux, gate = point
        local = params.with_flux(2.0 * np.pi * flux).with_gate_charge(gate)
        try:
            energies = squid_energies(local, levels, basis)
        except Exception as exc:
            raise SolverError(
                f"eigensolve failed at flux = {flux} Phi_0, n_g = {gate}: {exc}"
            ) from exc
        return f_idx, g_idx, energies

    energies = np.empty((flux_grid.size, len(n_g_values), levels))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(solve, points))
    else:
        results = [solve(p) for p in points]
    for f_idx, g_idx, vals in results:
        energies[f_idx, g_idx] = vals

    metadata = {
        "cutoff": basis.cutoff,
        "cutoff_converged": basis.converged,
        "levels": levels,
        "alpha_negative": params.alpha < 0.0,
    }
    return Spectrum(
        flux=flux_grid, n_g=n_g_values, energies=energies, basis=basis, metadata=metadata
    )
