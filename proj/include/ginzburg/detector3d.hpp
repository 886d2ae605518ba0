#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "ginzburg/detector1d.hpp"  // RateMethod, RateResult
#include "ginzburg/errors.hpp"
#include "ginzburg/medium.hpp"
#include "ginzburg/quadrature.hpp"
#include "ginzburg/units.hpp"

// 3D detector rates.  The detector moves along +z; the dipole triple is
// given in the detector frame with z the motion axis.  After the delta
// removes k (k* = (omega/gamma + kappa)/(eta v), eta = cos theta), the rate
// is a (kappa, eta) integral with the angular weight
//   (1+eta^2)/2 (|d_x|^2 + |d_y|^2) + (1-eta^2) |d_z|^2,
// whose eta integrals give the closed-form prefactors 3/8 and 1/4.  A wave
// number cutoff k_max turns into a Heaviside that empties the phase space
// below eta_min = (omega + Omega)/(|v| k_max).

namespace ginzburg {

struct DetectorSpec3D {
    double gap;                      // omega, eV
    std::array<double, 3> dipoles;   // |d_x|, |d_y|, |d_z| in e*a0
    double velocity;                 // fraction of c, along +z

    DetectorSpec3D(double omega, std::array<double, 3> d, double v)
        : gap(omega), dipoles(d), velocity(v)
    {
        if (!(omega > 0.0))
            throw DomainError("DetectorSpec3D: gap must be positive");
        if (!(std::abs(v) < 1.0))
            throw DomainError("DetectorSpec3D: |v| must be < 1");
        for (double di : d)
            if (!(di >= 0.0))
                throw DomainError("DetectorSpec3D: dipole magnitudes must be >= 0");
    }

    double lorentz_gamma() const { return 1.0 / std::sqrt(1.0 - velocity * velocity); }
    double dsq_xy() const { return dipoles[0] * dipoles[0] + dipoles[1] * dipoles[1]; }
    double dsq_z() const { return dipoles[2] * dipoles[2]; }
    double dsq_total() const { return dsq_xy() + dsq_z(); }
};

struct CutoffSpec {
    std::optional<double> k_max;  // eV

    CutoffSpec() = default;
    explicit CutoffSpec(double km) : k_max(km)
    {
        if (!(km > 0.0))
            throw DomainError("CutoffSpec: k_max must be positive");
    }
};

/// Minimum direction cosine (omega + Omega)/(|v| k_max) below which the
/// cutoff forbids excitation; > 1 means no Ginzburg phase space at all.
inline double eta_min(double omega, const MediumParams& m, double v, double k_max)
{
    if (v == 0.0)
        throw DomainError("eta_min: velocity must be nonzero");
    if (!(k_max > 0.0))
        throw DomainError("eta_min: k_max must be positive");
    return (omega + m.omega_res) / (std::abs(v) * k_max);
}

/// max{3/8 - eta^2/4 - eta^4/8, 0} = int_{eta_min}^1 eta (1+eta^2)/2 deta
/// clipped at zero; the d_xy prefactor under a cutoff.
inline double cutoff_prefactor_xy(double eta_min_value)
{
    const double e2 = eta_min_value * eta_min_value;
    return std::max(0.375 - 0.25 * e2 - 0.125 * e2 * e2, 0.0);
}

/// Exact (kappa, eta) rate with optional wave-number cutoff.  Natural units;
/// dipoles enter as plain squared magnitudes.
inline RateResult excitation_rate_3d_exact(const DetectorSpec3D& d, const MediumParams& m,
                                           const CutoffSpec& cut = {},
                                           const QuadratureConfig& cfg = {})
{
    RateResult out;
    out.method = RateMethod::exact;
    if (d.velocity == 0.0) return out;

    const double speed = std::abs(d.velocity);
    const double gamma = d.lorentz_gamma();
    const double og = d.gap / gamma;
    const double gam_res = std::max(m.damping_rate(), 1e-13 * m.omega_res);

    QuadratureConfig inner_cfg = cfg;
    inner_cfg.rel_tol = std::max(cfg.rel_tol * 0.3, 1e-12);

    auto kappa_integral = [&](double eta) {
        const double ev = eta * speed;
        double kappa_up = 0.0;  // 0 = no cutoff
        if (cut.k_max) {
            kappa_up = ev * (*cut.k_max) - og;
            if (kappa_up <= 0.0) return 0.0;
        }
        auto f = [&](double kappa) {
            const double ks = (og + kappa) / ev;
            return kappa * kappa * kappa * ks * ks / spectral_function_sq(ks, kappa, m);
        };
        QuadratureConfig qc = inner_cfg;
        qc.peak_hints.push_back({m.omega_res, gam_res});
        const PeakHint cross = det_detail::crossing_hint(og, ev, m);
        if (cross.width > 0.0) qc.peak_hints.push_back(cross);
        if (kappa_up > 0.0) {
            auto breaks = detail::hint_breakpoints(qc.peak_hints, 0.0, kappa_up);
            return integrate_adaptive<double>(f, breaks, qc).value;
        }
        return integrate_semi_infinite(f, qc).value;
    };

    auto outer = [&](double eta) {
        const double w = 0.5 * (1.0 + eta * eta) * d.dsq_xy() + (1.0 - eta * eta) * d.dsq_z();
        return kappa_integral(eta) * w / (eta * speed);
    };

    // eta breakpoints: under a cutoff the resonance peak enters the kappa
    // domain around eta = (og + Omega)/(v k_max); the integrand grows rapidly
    // across a few widths of that threshold.
    std::vector<double> eb{0.0, 0.25, 0.5, 0.75, 1.0};
    if (cut.k_max) {
        const double denom = speed * (*cut.k_max);
        for (double s : {-10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0}) {
            for (double base : {og, og + m.omega_res}) {
                const double e = (base + s * gam_res) / denom;
                if (e > 0.0 && e < 1.0) eb.push_back(e);
            }
        }
    }
    const auto integral = integrate_adaptive<double>(outer, std::move(eb), cfg);

    const double pref = m.coupling_g * m.coupling_g * m.coupling_G_sq * d.gap * d.gap /
                        (8.0 * det_detail::kPi * det_detail::kPi * gamma * gamma) * 2.0;
    out.value = pref * integral.value;
    out.error_estimate = pref * integral.error;
    out.converged = integral.converged;
    return out;
}

/// Small-v, weak-G closed form:
///   (g^2 omega^2 / 4pi) Omega/(Omega+omega)^2 |v|
///       [ 3/8 (|d_x|^2+|d_y|^2) + 1/4 |d_z|^2 ].
/// With equal dipoles Lambda it reduces to (Lambda^2 g^2 omega^2/4pi)
/// Omega/(Omega+omega)^2 |v|; linear in |v|.
inline RateResult excitation_rate_3d_closed(const DetectorSpec3D& d, const MediumParams& m)
{
    RateResult out;
    out.method = RateMethod::closed;
    const double s = m.omega_res + d.gap;
    out.value = m.coupling_g * m.coupling_g * d.gap * d.gap / (4.0 * det_detail::kPi) *
                m.omega_res / (s * s) * std::abs(d.velocity) *
                (0.375 * d.dsq_xy() + 0.25 * d.dsq_z());
    return out;
}

/// Cutoff-corrected closed form: 3/8 -> max{3/8 - eta_min^2/4 - eta_min^4/8, 0}
/// and the d_z channel drops (its integrand vanishes at eta = 1).
inline RateResult excitation_rate_3d_cutoff(const DetectorSpec3D& d, const MediumParams& m,
                                            const CutoffSpec& cut)
{
    if (!cut.k_max)
        throw DomainError("excitation_rate_3d_cutoff: k_max required");
    RateResult out;
    out.method = RateMethod::cutoff;
    if (d.velocity == 0.0) return out;
    const double em = eta_min(d.gap, m, d.velocity, *cut.k_max);
    const double s = m.omega_res + d.gap;
    out.value = m.coupling_g * m.coupling_g * d.gap * d.gap / (4.0 * det_detail::kPi) *
                m.omega_res / (s * s) * std::abs(d.velocity) *
                cutoff_prefactor_xy(em) * d.dsq_xy();
    return out;
}

/// Zero-velocity decay rate for omega < Omega, weak G:
///   (omega^3/3pi) sqrt(1 + g^2/(Omega^2 - omega^2)) sum_i |d_i|^2.
inline RateResult decay_rate_3d(const DetectorSpec3D& d, const MediumParams& m)
{
    if (!(d.gap < m.omega_res))
        throw OutOfValidityError("decay_rate_3d: derived for omega < Omega");
    RateResult out;
    out.method = RateMethod::closed;
    const double om = d.gap;
    const double enh = std::sqrt(1.0 + m.coupling_g * m.coupling_g /
                                           (m.omega_res * m.omega_res - om * om));
    out.value = om * om * om / (3.0 * det_detail::kPi) * enh * d.dsq_total();
    return out;
}

/// Excitation/decay ratio for the 2s -> 3p (m = +-1, quantization axis along
/// the motion, d_z = 0) configuration:
///   (9/32) sqrt(1 - g^2/(Omega^2 - omega^2 + g^2)) g^2/(Omega+omega)^2
///       (Omega/omega) |v|.
/// Equals excitation_rate_3d_closed / decay_rate_3d identically for d_z = 0.
inline double rate_ratio_2s3p(const MediumParams& m, double omega, double v)
{
    if (!(omega > 0.0))
        throw DomainError("rate_ratio_2s3p: omega must be positive");
    if (!(omega < m.omega_res))
        throw OutOfValidityError("rate_ratio_2s3p: derived for omega < Omega");
    const double g2 = m.coupling_g * m.coupling_g;
    const double s = m.omega_res + omega;
    const double under = 1.0 - g2 / (m.omega_res * m.omega_res - omega * omega + g2);
    return 9.0 / 32.0 * std::sqrt(under) * g2 / (s * s) * (m.omega_res / omega) * std::abs(v);
}

// --- SI conversion ---------------------------------------------------------

/// Unit declaration for a natural-units rate expression.  The 3D rate is
/// cubic in energies, quadratic in dipoles and linear in velocity; only that
/// combination converts to s^-1 through mu_0/(hbar c^2).
struct NaturalRateContext {
    int energy_power = 0;    // eV -> angular frequency
    int dipole_power = 0;    // e*a0 -> C m
    int velocity_power = 0;  // c -> m/s
};

inline NaturalRateContext rate3d_unit_context() { return {3, 2, 1}; }

struct SiRate {
    double per_second = 0.0;
    double per_cm = 0.0;  // rate / (v in cm/s)
};

/// Convert a natural-units 3D rate (energies in eV, dipoles in e*a0,
/// velocity in c) to SI.  Rejects any unit declaration other than the
/// {energy^3, dipole^2, velocity^1} structure of the 3D formulas, for which
/// [mu_0/(hbar c^2)] [C^2 m^2] [s^-3] [m/s] = s^-1.
inline SiRate rate_to_si(double rate_natural, const NaturalRateContext& ctx, double velocity_c)
{
    if (ctx.energy_power != 3 || ctx.dipole_power != 2 || ctx.velocity_power != 1)
        throw DomainError("rate_to_si: unit declaration must be energy^3 * dipole^2 * velocity "
                          "(the 3D rate structure); dimensional audit failed");
    const double factor = units::si_rate_factor() *
                          units::eV_to_rad_s * units::eV_to_rad_s * units::eV_to_rad_s *
                          units::e_a0_to_C_m * units::e_a0_to_C_m * units::speed_of_light;
    SiRate out;
    out.per_second = rate_natural * factor;
    if (out.per_second != 0.0) {
        const double v_cm_s = std::abs(velocity_c) * units::speed_of_light * 100.0;
        out.per_cm = out.per_second / v_cm_s;
    }
    return out;
}

}  // namespace ginzburg
