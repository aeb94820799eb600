"""Physical constants and the unit conversions used throughout the package.

All energies are handled as E/h in GHz.  Capacitances are in fF, inductances
in pH, currents in uA, and reduced fluxes in radians.  Every conversion
between those units lives here so that no magic number appears twice.
"""

import math

# SI defining constants (2019 redefinition; exact)
E_CHARGE = 1.602176634e-19  # elementary charge [C]
PLANCK_H = 6.62607015e-34  # Planck constant [J s]

FLUX_QUANTUM = PLANCK_H / (2.0 * E_CHARGE)  # superconducting flux quantum [Wb]
PHI0_BAR = FLUX_QUANTUM / (2.0 * math.pi)  # reduced flux quantum [Wb/rad]

# E_C[GHz] = EC_GHZ_FF / C[fF]  with  E_C = e^2 / 2C
EC_GHZ_FF = E_CHARGE**2 / (2.0 * PLANCK_H) / 1e9 * 1e15

# E_L[GHz] = EL_GHZ_PH / L[pH]  with  E_L = (Phi_0 / 2 pi)^2 / L
EL_GHZ_PH = PHI0_BAR**2 / PLANCK_H / 1e9 * 1e12

# I[uA] = CURRENT_UA_PER_GHZ * dU/dphi[GHz]  with  I = (2 pi / Phi_0) dU/dphi
CURRENT_UA_PER_GHZ = PLANCK_H * 1e9 / PHI0_BAR * 1e6


def charging_energy_ghz(capacitance_ff: float) -> float:
    """E_C = e^2/2C in GHz for a capacitance in fF."""
    if capacitance_ff <= 0.0:
        raise ValueError(f"capacitance must be positive, got {capacitance_ff}")
    return EC_GHZ_FF / capacitance_ff


def capacitance_ff(charging_energy: float) -> float:
    """Capacitance in fF corresponding to a charging energy E_C in GHz."""
    if charging_energy <= 0.0:
        raise ValueError(f"charging energy must be positive, got {charging_energy}")
    return EC_GHZ_FF / charging_energy


def inductive_energy_ghz(inductance_ph: float) -> float:
    """E_L = (Phi_0/2 pi)^2 / L in GHz for an inductance in pH."""
    if inductance_ph <= 0.0:
        raise ValueError(f"inductance must be positive, got {inductance_ph}")
    return EL_GHZ_PH / inductance_ph


def inductance_ph(inductive_energy: float) -> float:
    """Inductance in pH corresponding to an inductive energy E_L in GHz."""
    if inductive_energy <= 0.0:
        raise ValueError(f"inductive energy must be positive, got {inductive_energy}")
    return EL_GHZ_PH / inductive_energy
