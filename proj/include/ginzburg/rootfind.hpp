#pragma once

#include <cmath>
#include <utility>

#include "ginzburg/errors.hpp"

namespace ginzburg {

/// Brent's method on [a, b].  f(a) and f(b) must bracket a root.
template <class F>
double find_root_brent(F&& f, double a, double b, double tol = 1e-14, int max_iter = 200)
{
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (std::signbit(fa) == std::signbit(fb))
        throw CalibrationError("find_root_brent: endpoints do not bracket a root");

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double eps = 2.0 * 2.220446049250313e-16 * std::abs(b) + 0.5 * tol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= eps || fb == 0.0) return b;

        if (std::abs(e) < eps || std::abs(fa) <= std::abs(fb)) {
            d = m; e = m;  // bisection
        } else {
            double s = fb / fa, p, q;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double r = fb / fc;
                const double t = fa / fc;
                p = s * (2.0 * m * t * (t - r) - (b - a) * (r - 1.0));
                q = (t - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(eps * q), std::abs(e * q))) {
                e = d; d = p / q;  // accept interpolation
            } else {
                d = m; e = m;
            }
        }
        a = b; fa = fb;
        b += (std::abs(d) > eps) ? d : (m > 0.0 ? eps : -eps);
        fb = f(b);
        if (std::signbit(fb) == std::signbit(fc)) {
            c = a; fc = fa;
            d = b - a; e = d;
        }
    }
    return b;
}

}  // namespace ginzburg
