#pragma once

#include <cmath>

#include "ginzburg/errors.hpp"

// Physical constants (CODATA 2018) and the handful of conversions this
// project needs.  Internal canonical system is natural units (hbar = c = 1)
// with energies in eV; SI appears only at API boundaries.

namespace ginzburg::units {

enum class UnitSystem { natural_eV, SI };

// SI base constants
inline constexpr double elementary_charge = 1.602176634e-19;  // C (exact)
inline constexpr double planck_h          = 6.62607015e-34;   // J s (exact)
inline constexpr double hbar              = 1.054571817646156e-34;  // h / 2pi
inline constexpr double speed_of_light    = 299792458.0;      // m/s (exact)
inline constexpr double mu_0              = 1.25663706212e-6; // N/A^2
inline constexpr double bohr_radius       = 5.29177210903e-11;  // m

// Derived conversion factors
inline constexpr double hbar_c_eV_nm   = 197.3269804;  // hbar*c in eV nm
inline constexpr double eV_to_rad_s    = elementary_charge / hbar;      // 1 eV as angular frequency
inline constexpr double e_a0_to_C_m    = elementary_charge * bohr_radius;  // 1 e*a0 in C m

/// Energy in eV interpreted as an angular frequency, in s^-1.
inline double energy_to_angular_frequency(double energy_eV)
{
    return energy_eV * eV_to_rad_s;
}

/// hbar*c / E: the length scale (nm) associated with an energy (eV).
inline double inverse_energy_to_length(double energy_eV)
{
    if (!(energy_eV > 0.0))
        throw DomainError("inverse_energy_to_length: energy must be positive");
    return hbar_c_eV_nm / energy_eV;
}

/// Inverse of the above: length in nm back to an energy in eV.
inline double inverse_length_to_energy(double length_nm)
{
    if (!(length_nm > 0.0))
        throw DomainError("inverse_length_to_energy: length must be positive");
    return hbar_c_eV_nm / length_nm;
}

/// mu_0 / (hbar c^2).  Multiplying the 3D rate expression evaluated with all
/// SI inputs (Omega, g, G^2 as angular frequencies, v in m/s, dipoles in C m)
/// by this factor yields a rate in s^-1.
inline double si_rate_factor()
{
    return mu_0 / (hbar * speed_of_light * speed_of_light);
}

}  // namespace ginzburg::units
