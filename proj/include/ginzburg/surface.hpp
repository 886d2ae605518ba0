#pragma once

#include <cmath>

#include "ginzburg/errors.hpp"
#include "ginzburg/medium.hpp"
#include "ginzburg/rootfind.hpp"
#include "ginzburg/units.hpp"

// Evanescent-field physics outside the medium.  The relevant bulk modes sit
// near the resonance (omega_vac ~ Omega, k_y ~ 0), so outside the crystal
// they decay with e-folding length l(k_z) = 1/sqrt(k_z^2 - Omega^2).  A
// detector passing at distance d sees the excitation rate suppressed by
// exp(-2d/l); for a beam through a hole of radius R the factor is averaged
// over the disk with d the radial distance to the boundary.

namespace ginzburg {

struct SurfaceGeometry {
    enum class Kind { plate, hole };
    Kind kind = Kind::hole;
    double plate_distance_nm = 0.0;
    double hole_radius_mm = 0.0;

    static SurfaceGeometry plate(double d_nm)
    {
        if (!(d_nm >= 0.0))
            throw DomainError("SurfaceGeometry: plate distance must be >= 0");
        SurfaceGeometry g;
        g.kind = Kind::plate;
        g.plate_distance_nm = d_nm;
        return g;
    }
    static SurfaceGeometry hole(double r_mm)
    {
        if (!(r_mm > 0.0))
            throw DomainError("SurfaceGeometry: hole radius must be > 0");
        SurfaceGeometry g;
        g.kind = Kind::hole;
        g.hole_radius_mm = r_mm;
        return g;
    }
};

/// Doppler condition for excitation by a resonance-dominated evanescent mode
/// (omega_vac ~ Omega): k_z v >= omega/gamma + Omega.
inline bool excitation_condition(double omega, const MediumParams& m, double v, double k_z)
{
    if (!(std::abs(v) < 1.0))
        throw DomainError("excitation_condition: |v| must be < 1");
    const double gamma = 1.0 / std::sqrt(1.0 - v * v);
    return k_z * v >= omega / gamma + m.omega_res;
}

/// Smallest v with v k_max = omega/gamma(v) + Omega.  With gamma -> 1 this is
/// (omega + Omega)/k_max; the exact root is slightly below.
inline double min_velocity(double omega, const MediumParams& m, double k_max)
{
    if (!(k_max > 0.0))
        throw DomainError("min_velocity: k_max must be positive");
    auto f = [&](double v) {
        return v * k_max - omega * std::sqrt(1.0 - v * v) - m.omega_res;
    };
    if (f(1.0) <= 0.0)
        throw InfeasibleError("min_velocity: no sub-luminal velocity satisfies the condition");
    return find_root_brent(f, 0.0, 1.0);
}

/// e-folding length l = 1/sqrt(k_z^2 - Omega^2), returned in nm.
inline double efolding_length(double k_z, const MediumParams& m)
{
    if (!(k_z > m.omega_res))
        throw NonEvanescentError("efolding_length: k_z <= Omega propagates outside the medium");
    const double ell_inv_eV = std::sqrt(k_z * k_z - m.omega_res * m.omega_res);
    return units::inverse_energy_to_length(ell_inv_eV);
}

/// Rate suppression exp(-2 d / l) at distance d from the surface (the field
/// amplitude suppression squared, since the rate is a two-point quantity).
inline double suppression_at_distance(double d_nm, double ell_nm)
{
    if (!(d_nm >= 0.0))
        throw DomainError("suppression_at_distance: distance must be >= 0");
    if (!(ell_nm > 0.0))
        throw DomainError("suppression_at_distance: e-folding length must be > 0");
    return std::exp(-2.0 * d_nm / ell_nm);
}

/// Disk average (2/R^2) int_0^R r exp(-2(R-r)/l) dr in closed form:
///   S(x) = 2 (x - 1 + e^{-x}) / x^2,  x = 2R/l.
/// Tends to 1 for l >> R and to l/R for l << R.
inline double beam_average_suppression(double hole_radius_mm, double ell_nm)
{
    if (!(hole_radius_mm > 0.0))
        throw DomainError("beam_average_suppression: radius must be > 0");
    if (!(ell_nm > 0.0))
        throw DomainError("beam_average_suppression: e-folding length must be > 0");
    const double r_nm = hole_radius_mm * 1e6;
    const double x = 2.0 * r_nm / ell_nm;
    if (x < 1e-3)  // series; the closed form cancels at small x
        return 1.0 - x / 3.0 + x * x / 12.0;
    return 2.0 * (x - 1.0 + std::exp(-x)) / (x * x);
}

}  // namespace ginzburg
