#pragma once

#include <array>
#include <cmath>

#include "ginzburg/quadrature.hpp"

// Hydrogen 2s -> 3p transition dipoles from the analytic radial
// wavefunctions, in units of e*a0.  Radial coordinate x = r/a0 throughout.
// For m = +-1 final states with the quantization axis along the motion the
// angular factors give d_z = 0 and |d_x| = |d_y| = R_radial/sqrt(6).

namespace ginzburg::hydrogen {

inline double radial_R20(double x)
{
    return (1.0 / std::sqrt(2.0)) * (1.0 - 0.5 * x) * std::exp(-0.5 * x);
}

inline double radial_R31(double x)
{
    return 8.0 / (27.0 * std::sqrt(6.0)) * x * (1.0 - x / 6.0) * std::exp(-x / 3.0);
}

namespace hyd_detail {

inline QuadratureConfig radial_cfg()
{
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.tail_cutoff = 200.0;  // integrands carry exp(-x/3) at least
    return cfg;
}

}  // namespace hyd_detail

/// int_0^inf R20^2 x^2 dx; 1 for the normalized wavefunction.
inline double radial_norm_2s()
{
    auto f = [](double x) { return radial_R20(x) * radial_R20(x) * x * x; };
    return integrate_semi_infinite(f, hyd_detail::radial_cfg()).value;
}

/// int_0^inf R31^2 x^2 dx; 1 for the normalized wavefunction.
inline double radial_norm_3p()
{
    auto f = [](double x) { return radial_R31(x) * radial_R31(x) * x * x; };
    return integrate_semi_infinite(f, hyd_detail::radial_cfg()).value;
}

/// <R31| r |R20> in a0: the 2s -> 3p radial matrix element (~3.0648).
inline double radial_matrix_element_2s3p()
{
    auto f = [](double x) { return radial_R31(x) * x * radial_R20(x) * x * x; };
    return integrate_semi_infinite(f, hyd_detail::radial_cfg()).value;
}

/// (|d_x|, |d_y|, |d_z|) in e*a0 for 2s -> 3p, m = +-1, axis along motion.
inline std::array<double, 3> dipole_2s3p()
{
    const double r = radial_matrix_element_2s3p();
    const double dxy = r / std::sqrt(6.0);
    return {dxy, dxy, 0.0};
}

}  // namespace ginzburg::hydrogen
