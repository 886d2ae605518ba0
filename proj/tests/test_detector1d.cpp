#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ginzburg/detector1d.hpp"

using namespace ginzburg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
// the weak-dissipation benchmark point: Gamma/Omega = 1e-3
const MediumParams bench_medium(1.0, 0.3, 0.004);
const double bench_gap = 0.5;
}  // namespace

TEST_CASE("spec validation")
{
    CHECK_THROWS_AS(DetectorSpec1D(0.0, 1.0, 0.1), DomainError);
    CHECK_THROWS_AS(DetectorSpec1D(1.0, 1.0, 1.0), DomainError);
    CHECK_THAT(DetectorSpec1D(1.0, 1.0, 0.6).lorentz_gamma(), WithinRel(1.25, 1e-12));
}

TEST_CASE("zero velocity gives exactly zero")
{
    const DetectorSpec1D d(bench_gap, 1.0, 0.0);
    CHECK(excitation_rate_exact(d, bench_medium).value == 0.0);
    CHECK(excitation_rate_smallv(d, bench_medium).value == 0.0);
    CHECK(excitation_rate_weakG(d, bench_medium).value == 0.0);
}

TEST_CASE("exact rate is even in v and nonnegative")
{
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> par(0.1, 3.0);
    std::uniform_real_distribution<double> vel(0.01, 0.8);
    for (int i = 0; i < 6; ++i) {
        const double om = par(rng);
        const MediumParams m(om, par(rng), std::min(par(rng), 3.5 * om));
        const double v = vel(rng);
        const DetectorSpec1D dp(par(rng), 1.0, v);
        const DetectorSpec1D dm(dp.gap, 1.0, -v);
        const RateResult rp = excitation_rate_exact(dp, m);
        const RateResult rm = excitation_rate_exact(dm, m);
        CHECK(rp.value >= 0.0);
        CHECK(rp.value == rm.value);
    }
}

TEST_CASE("exact matches the small-v expansion at v = 1e-2")
{
    const DetectorSpec1D d(bench_gap, 1.0, 1e-2);
    const RateResult re = excitation_rate_exact(d, bench_medium);
    const RateResult rs = excitation_rate_smallv(d, bench_medium);
    REQUIRE(re.converged);
    REQUIRE(rs.converged);
    CHECK_THAT(rs.value, WithinRel(re.value, 0.02));
    // frozen cross-check of the absolute scale (independent fine-grid run)
    CHECK_THAT(re.value, WithinRel(2.22046e-9, 5e-4));
}

TEST_CASE("small-v rate scales exactly as |v|^3")
{
    const DetectorSpec1D d1(bench_gap, 1.0, 0.004);
    const DetectorSpec1D d2(bench_gap, 1.0, 0.008);
    const RateResult r1 = excitation_rate_smallv(d1, bench_medium);
    const RateResult r2 = excitation_rate_smallv(d2, bench_medium);
    CHECK_THAT(r2.value, WithinRel(8.0 * r1.value, 1e-13));
}

TEST_CASE("g = 0 media do not excite")
{
    const MediumParams vac(1.0, 0.0, 0.1);
    const DetectorSpec1D d(0.5, 1.0, 0.3);
    CHECK(excitation_rate_exact(d, vac).value == 0.0);
    CHECK(excitation_rate_smallv(d, vac).value == 0.0);
    CHECK(excitation_rate_weakG(d, vac).value == 0.0);
}

TEST_CASE("weak-G closed form")
{
    // lambda=1, g=1, omega=1, Omega=1, v=0.1 -> (1/2)(1/16)1e-3
    const MediumParams m(1.0, 1.0, 0.2);
    const DetectorSpec1D d(1.0, 1.0, 0.1);
    CHECK_THAT(excitation_rate_weakG(d, m).value, WithinRel(3.125e-5, 1e-12));

    // identical for any stored G^2 (the closed form does not read it)
    const MediumParams m2(1.0, 1.0, 3.9);
    CHECK(excitation_rate_weakG(d, m2).value == excitation_rate_weakG(d, m).value);

    // response peaks at omega = Omega
    const double at_res = excitation_rate_weakG(DetectorSpec1D(1.0, 1.0, 0.1), m).value;
    CHECK(at_res > excitation_rate_weakG(DetectorSpec1D(0.8, 1.0, 0.1), m).value);
    CHECK(at_res > excitation_rate_weakG(DetectorSpec1D(1.2, 1.0, 0.1), m).value);
}

TEST_CASE("small-v converges to weak-G as dissipation vanishes")
{
    const DetectorSpec1D d(bench_gap, 1.0, 0.01);
    double prev_gap = 1e300;
    for (double g2 : {0.4, 0.04, 0.004}) {  // G^2 = {1e-1,1e-2,1e-3} * 4 Omega Gamma-scale
        const MediumParams m(1.0, 0.3, g2);
        const double rs = excitation_rate_smallv(d, m).value;
        const double rw = excitation_rate_weakG(d, m).value;
        const double rel = std::abs(rs - rw) / rw;
        CHECK(rel < prev_gap);
        prev_gap = rel;
    }
    CHECK(prev_gap < 0.03);  // at Gamma/Omega = 1e-3
}

TEST_CASE("exact -> small-v discrepancy shrinks like v^2")
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double v : {1e-3, 3.16e-3, 1e-2}) {
        const DetectorSpec1D d(bench_gap, 1.0, v);
        const double re = excitation_rate_exact(d, bench_medium).value;
        const double rs = excitation_rate_smallv(d, bench_medium).value;
        const double rel = std::abs(re - rs) / re;
        sx += std::log(v);
        sy += std::log(rel);
        sxx += std::log(v) * std::log(v);
        sxy += std::log(v) * std::log(rel);
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope > 1.5);  // relative difference ~ C v^2
}

TEST_CASE("v^3 exponent fit on the exact rate")
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double v : {1e-3, 3.16e-3, 1e-2}) {
        const DetectorSpec1D d(bench_gap, 1.0, v);
        const double r = excitation_rate_exact(d, bench_medium).value;
        sx += std::log(v);
        sy += std::log(r);
        sxx += std::log(v) * std::log(v);
        sxy += std::log(v) * std::log(r);
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK_THAT(slope, WithinAbs(3.0, 0.05));
}

TEST_CASE("small-v warns above v = 0.1")
{
    const DetectorSpec1D d(0.5, 1.0, 0.2);
    CHECK_FALSE(excitation_rate_smallv(d, bench_medium).warning.empty());
    const DetectorSpec1D ok(0.5, 1.0, 0.05);
    CHECK(excitation_rate_smallv(ok, bench_medium).warning.empty());
}

TEST_CASE("boosted mode energy and anomalous region")
{
    CHECK(boosted_mode_energy(3.0, 1.5, 0.0) == 1.5);
    CHECK_THAT(boosted_mode_energy(2.0, 1.0, 0.5), WithinAbs(0.0, 1e-14));  // threshold
    CHECK(boosted_mode_energy(10.0, 1.0, 0.5) < 0.0);                       // anomalous
    CHECK_THROWS_AS(boosted_mode_energy(1.0, 1.0, 1.0), DomainError);

    CHECK(is_anomalous(10.0, 1.0, 0.5));
    CHECK_FALSE(is_anomalous(1.0, 1.0, 0.5));
    CHECK_FALSE(is_anomalous(2.0, 1.0, 0.5));  // boundary |kappa| = k v is excluded
}

TEST_CASE("every kappa on the delta line is anomalous")
{
    // k*(kappa) v = omega/gamma + kappa > kappa by construction
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> kap(0.0, 20.0);
    const DetectorSpec1D d(0.7, 1.0, 0.3);
    const double og = d.gap / d.lorentz_gamma();
    for (int i = 0; i < 200; ++i) {
        const double kappa = kap(rng);
        const double ks = (og + kappa) / std::abs(d.velocity);
        CHECK(is_anomalous(ks, kappa, std::abs(d.velocity)));
        CHECK(boosted_mode_energy(ks, kappa, std::abs(d.velocity)) < 0.0);
    }
}
