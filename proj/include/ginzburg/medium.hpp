#pragma once

#include <cmath>
#include <complex>

#include "ginzburg/errors.hpp"
#include "ginzburg/rootfind.hpp"

// The dissipative Hopfield medium: one polarization resonance Omega coupled
// to the field with strength g and to a one-dimensional loss channel with
// strength G.  Only G^2 enters any formula, so that is what is stored.
// The effective damping rate is Gamma = G^2/4 and construction enforces the
// under-damped regime Gamma < Omega.

namespace ginzburg {

struct MediumParams {
    double omega_res;     // resonance Omega, eV
    double coupling_g;    // light-matter coupling g, eV
    double coupling_G_sq; // dissipation coupling G^2, eV

    MediumParams(double omega, double g, double G_sq)
        : omega_res(omega), coupling_g(g), coupling_G_sq(G_sq)
    {
        if (!(omega > 0.0))
            throw DomainError("MediumParams: Omega must be positive");
        if (!(g >= 0.0) || !(G_sq >= 0.0))
            throw DomainError("MediumParams: couplings must be nonnegative");
        if (!(G_sq / 4.0 < omega))
            throw DomainError("MediumParams: overdamped (Gamma = G^2/4 must be < Omega)");
    }

    double damping_rate() const { return coupling_G_sq / 4.0; }  // Gamma
    double refractive_index_static() const
    {
        return std::sqrt(1.0 + coupling_g * coupling_g / (omega_res * omega_res));
    }
};

/// Spectral decomposition zeta(k, kappa) whose zeros define the complex
/// dispersion relation:
///   zeta = [Omega^2 - kappa^2 - i G^2 |kappa| / 2] (k^2 - kappa^2) - g^2 kappa^2.
/// Even under k -> -k and kappa -> -kappa.
inline std::complex<double> spectral_function(double k, double kappa, const MediumParams& m)
{
    const std::complex<double> bracket(m.omega_res * m.omega_res - kappa * kappa,
                                       -0.5 * m.coupling_G_sq * std::abs(kappa));
    return bracket * (k * k - kappa * kappa) - m.coupling_g * m.coupling_g * kappa * kappa;
}

/// |zeta|^2, the quantity every rate integrand divides by.
inline double spectral_function_sq(double k, double kappa, const MediumParams& m)
{
    const double B = m.omega_res * m.omega_res - kappa * kappa;
    const double C = 0.5 * m.coupling_G_sq * std::abs(kappa);
    const double D = m.coupling_g * m.coupling_g * kappa * kappa;
    const double u = k * k - kappa * kappa;
    const double re = B * u - D;
    const double im = C * u;
    return re * re + im * im;
}

/// Relative permittivity eps(omega) = 1 + g^2 / (Omega^2 - omega^2 - i G^2 |omega| / 2).
/// At omega = 0 this is exactly n0^2 = 1 + g^2/Omega^2.
inline std::complex<double> permittivity(double omega, const MediumParams& m)
{
    const std::complex<double> den(m.omega_res * m.omega_res - omega * omega,
                                   -0.5 * m.coupling_G_sq * std::abs(omega));
    if (den == std::complex<double>(0.0, 0.0)) {
        if (m.coupling_g > 0.0)
            throw ResonanceSingularityError(
                "permittivity: undamped pole at |omega| = Omega with G^2 = 0");
        return std::complex<double>(1.0, 0.0);
    }
    return 1.0 + m.coupling_g * m.coupling_g / den;
}

/// Complex refractive index sqrt(eps).  Principal branch; passivity
/// (Im eps >= 0) puts it in the first quadrant, so Im n >= 0 and Re n >= 0
/// (forward-propagating modes decay).
inline std::complex<double> refractive_index(double omega, const MediumParams& m)
{
    return std::sqrt(permittivity(omega, m));
}

/// Complex wave number k(kappa) = |kappa| sqrt(eps(kappa)) on the zeta = 0 branch.
inline std::complex<double> complex_wavenumber(double kappa, const MediumParams& m)
{
    return std::abs(kappa) * refractive_index(kappa, m);
}

/// Phase velocity |kappa| / Re k(kappa) as a fraction of c.
inline double phase_velocity(double kappa, const MediumParams& m)
{
    if (kappa == 0.0)
        throw DomainError("phase_velocity: kappa must be nonzero");
    const std::complex<double> k = complex_wavenumber(kappa, m);
    return std::abs(kappa) / k.real();
}

/// Coupling g from the low-energy refractive index: g = Omega sqrt(n0^2 - 1).
inline double calibrate_g_from_n0(double n0, double omega_res)
{
    if (!(n0 >= 1.0))
        throw DomainError("calibrate_g_from_n0: n0 must be >= 1");
    if (!(omega_res > 0.0))
        throw DomainError("calibrate_g_from_n0: Omega must be positive");
    return omega_res * std::sqrt(n0 * n0 - 1.0);
}

/// G^2 such that Re n(Omega) matches a measured on-resonance refractive
/// index.  At omega = Omega the permittivity is 1 + 2i g^2/(G^2 Omega), so the
/// target is reached by a one-dimensional root find in G^2 over the
/// under-damped bracket.  Residual |Re n(Omega) - target| < 1e-6 guaranteed.
inline double calibrate_G_from_resonance_n(double n_res_real, double omega_res, double g)
{
    if (!(n_res_real > 1.0))
        throw DomainError("calibrate_G_from_resonance_n: target must be > 1");
    if (!(g > 0.0))
        throw DomainError("calibrate_G_from_resonance_n: needs g > 0");

    auto re_n_at_res = [&](double G_sq) {
        const std::complex<double> eps(1.0, 2.0 * g * g / (G_sq * omega_res));
        return std::sqrt(eps).real();
    };
    const double lo = 1e-14 * omega_res;
    const double hi = 4.0 * omega_res * (1.0 - 1e-12);  // under-damped edge
    auto fn = [&](double G_sq) { return re_n_at_res(G_sq) - n_res_real; };
    if (fn(lo) < 0.0 || fn(hi) > 0.0)
        throw CalibrationError("calibrate_G_from_resonance_n: target outside under-damped bracket");
    const double G_sq = find_root_brent(fn, lo, hi, 1e-15 * omega_res);
    if (std::abs(re_n_at_res(G_sq) - n_res_real) >= 1e-6)
        throw CalibrationError("calibrate_G_from_resonance_n: residual above 1e-6");
    return G_sq;
}

/// Medium from optical calibration targets: static index n0 and the measured
/// real refractive index at resonance.
inline MediumParams calibrated_medium(double omega_res, double n0, double n_res_real)
{
    const double g = calibrate_g_from_n0(n0, omega_res);
    const double G_sq = calibrate_G_from_resonance_n(n_res_real, omega_res, g);
    return MediumParams(omega_res, g, G_sq);
}

}  // namespace ginzburg
