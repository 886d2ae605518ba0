#pragma once

#include <cmath>
#include <string>

#include "ginzburg/errors.hpp"
#include "ginzburg/medium.hpp"
#include "ginzburg/quadrature.hpp"
#include "ginzburg/rootfind.hpp"
#include "ginzburg/units.hpp"

// Excitation rates of an inertial two-level detector moving through the 1D
// medium.  The energy-conservation delta removes the k integral: for each
// kappa >= 0 the contributing wave number is k*(kappa) = (omega/gamma +
// kappa)/|v|, which always lies in the anomalous-Doppler region kv > kappa.
// 1D rates are reported in model units (Omega sets the scale); only the 3D
// module carries SI semantics.

namespace ginzburg {

struct DetectorSpec1D {
    double gap;              // omega, eV
    double coupling_lambda;  // dipole coupling, model units
    double velocity;         // fraction of c

    DetectorSpec1D(double omega, double lambda, double v)
        : gap(omega), coupling_lambda(lambda), velocity(v)
    {
        if (!(omega > 0.0))
            throw DomainError("DetectorSpec1D: gap must be positive");
        if (!(std::abs(v) < 1.0))
            throw DomainError("DetectorSpec1D: |v| must be < 1");
    }

    double lorentz_gamma() const { return 1.0 / std::sqrt(1.0 - velocity * velocity); }
};

enum class RateMethod { exact, small_v, weak_G, cutoff, closed };

struct RateResult {
    double value = 0.0;
    RateMethod method = RateMethod::exact;
    double error_estimate = 0.0;
    units::UnitSystem unit = units::UnitSystem::natural_eV;
    bool converged = true;
    std::string warning;
};

namespace det_detail {

inline constexpr double kPi = 3.141592653589793238462643;

/// Real dispersion branch n_r(kappa) = sqrt(1 + g^2/(Omega^2 - kappa^2)),
/// kappa < Omega.
inline double real_branch_index(double kappa, const MediumParams& m)
{
    return std::sqrt(1.0 + m.coupling_g * m.coupling_g /
                               (m.omega_res * m.omega_res - kappa * kappa));
}

/// kappa where the delta-line k*(kappa) crosses the real polariton branch
/// k = n_r(kappa) kappa; this is the sharp non-Lorentzian feature of the
/// exact-rate integrand.  Returns a peak hint, or width 0 if no crossing.
inline PeakHint crossing_hint(double omega_over_gamma, double speed, const MediumParams& m)
{
    if (m.coupling_g <= 0.0) return {0.0, 0.0};
    auto h = [&](double kappa) {
        return speed * real_branch_index(kappa, m) * kappa - omega_over_gamma - kappa;
    };
    const double hi = m.omega_res * (1.0 - 1e-13);
    if (h(hi) <= 0.0) return {0.0, 0.0};
    const double kc = find_root_brent(h, 1e-300, hi);

    // width from the dissipative part at the crossing:
    // |zeta|^2 = [B u - D]^2 + C^2 u^2 with u = k*^2 - kappa^2; the real part
    // vanishes at kc, so the half-width is |C u| / |d(Bu - D)/dkappa|
    const double ks = (omega_over_gamma + kc) / speed;
    const double u = ks * ks - kc * kc;
    const double C = 0.5 * m.coupling_G_sq * kc;
    auto f_re = [&](double kappa) {
        const double kk = (omega_over_gamma + kappa) / speed;
        const double B = m.omega_res * m.omega_res - kappa * kappa;
        return B * (kk * kk - kappa * kappa) -
               m.coupling_g * m.coupling_g * kappa * kappa;
    };
    const double d = 1e-6 * m.omega_res;
    const double slope = std::abs((f_re(kc + d) - f_re(kc - d)) / (2.0 * d));
    const double w = slope > 0.0 ? std::abs(C * u) / slope : 0.0;
    return {kc, std::max(w, 1e-13 * m.omega_res)};
}

}  // namespace det_detail

/// Exact delta-reduced rate,
///   [lambda^2 g^2 G^2 omega^2 / (2 pi gamma^2 |v|)]
///       int_0^inf dkappa kappa^3 / |zeta(k*(kappa), kappa)|^2.
/// Symmetric in v -> -v; exactly zero at v = 0 (the delta cannot fire).
inline RateResult excitation_rate_exact(const DetectorSpec1D& d, const MediumParams& m,
                                        const QuadratureConfig& cfg = {})
{
    RateResult out;
    out.method = RateMethod::exact;
    if (d.velocity == 0.0) return out;

    const double speed = std::abs(d.velocity);
    const double gamma = d.lorentz_gamma();
    const double og = d.gap / gamma;

    auto f = [&](double kappa) {
        const double ks = (og + kappa) / speed;
        const double k3 = kappa * kappa * kappa;
        return k3 / spectral_function_sq(ks, kappa, m);
    };

    QuadratureConfig qc = cfg;
    qc.peak_hints.push_back({m.omega_res, std::max(m.damping_rate(), 1e-13 * m.omega_res)});
    const PeakHint cross = det_detail::crossing_hint(og, speed, m);
    if (cross.width > 0.0) qc.peak_hints.push_back(cross);

    const IntegralResult integral = integrate_semi_infinite(f, qc);
    const double pref = d.coupling_lambda * d.coupling_lambda * m.coupling_g * m.coupling_g *
                        m.coupling_G_sq * d.gap * d.gap /
                        (2.0 * det_detail::kPi * gamma * gamma * speed);
    out.value = pref * integral.value;
    out.error_estimate = pref * integral.error;
    out.converged = integral.converged;
    return out;
}

/// Lowest order in v of the exact rate; scales exactly as |v|^3.
inline RateResult excitation_rate_smallv(const DetectorSpec1D& d, const MediumParams& m,
                                         const QuadratureConfig& cfg = {})
{
    RateResult out;
    out.method = RateMethod::small_v;
    if (std::abs(d.velocity) > 0.1)
        out.warning = "small-v expansion used above v = 0.1";
    if (d.velocity == 0.0) return out;

    const double om = d.gap;
    const double G4 = m.coupling_G_sq * m.coupling_G_sq;
    auto f = [&](double kappa) {
        const double k2 = kappa * kappa;
        const double res = k2 - m.omega_res * m.omega_res;
        const double den = res * res + k2 * G4 / 4.0;
        const double kp = kappa + om;
        return kappa * k2 / (kp * kp * kp * kp * den);
    };

    QuadratureConfig qc = cfg;
    qc.peak_hints.push_back({m.omega_res, std::max(m.damping_rate(), 1e-13 * m.omega_res)});
    const IntegralResult integral = integrate_semi_infinite(f, qc);

    const double v3 = std::pow(std::abs(d.velocity), 3);
    const double pref = d.coupling_lambda * d.coupling_lambda * m.coupling_g * m.coupling_g *
                        m.coupling_G_sq * om * om * v3 / (2.0 * det_detail::kPi);
    out.value = pref * integral.value;
    out.error_estimate = pref * integral.error;
    out.converged = integral.converged;
    return out;
}

/// Weak-dissipation closed form (the kappa integral collapses onto the
/// resonance): (lambda^2 g^2 omega^2 / 2) Omega/(Omega+omega)^4 |v|^3.
/// Independent of the stored G^2.
inline RateResult excitation_rate_weakG(const DetectorSpec1D& d, const MediumParams& m)
{
    RateResult out;
    out.method = RateMethod::weak_G;
    const double om = d.gap;
    const double s = m.omega_res + om;
    out.value = 0.5 * d.coupling_lambda * d.coupling_lambda * m.coupling_g * m.coupling_g *
                om * om * m.omega_res / (s * s * s * s) *
                std::pow(std::abs(d.velocity), 3);
    return out;
}

/// Energy of the (k, kappa) mode seen from the frame moving at v:
/// gamma (|kappa| - k v).  Negative in the anomalous-Doppler region.
inline double boosted_mode_energy(double k, double kappa, double v)
{
    if (!(std::abs(v) < 1.0))
        throw DomainError("boosted_mode_energy: |v| must be < 1");
    const double gamma = 1.0 / std::sqrt(1.0 - v * v);
    return gamma * (std::abs(kappa) - k * v);
}

/// Anomalous-Doppler flag: |kappa| < k v, i.e. the detector outruns the
/// mode's phase velocity (strict inequality; the boundary is measure zero).
inline bool is_anomalous(double k, double kappa, double v)
{
    return std::abs(kappa) < k * v;
}

}  // namespace ginzburg
