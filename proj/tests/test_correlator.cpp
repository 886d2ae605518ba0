#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "ginzburg/correlator.hpp"
#include "ginzburg/medium.hpp"

using namespace ginzburg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using cplx = std::complex<double>;

namespace {
constexpr double kPi = 3.141592653589793238462643;

MediumParams unit_medium() { return MediumParams(1.0, 1.0, 0.4); }
MediumParams silicon() { return calibrated_medium(3.3, 3.4, 6.8); }
}  // namespace

TEST_CASE("spectral density basics")
{
    const MediumParams no_coupling(1.0, 0.0, 0.2);
    CHECK(spectral_density(0.7, 1.3, no_coupling) == 0.0);
    CHECK(spectral_density(0.7, 0.0, unit_medium()) == 0.0);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> par(0.1, 4.0);
    std::uniform_real_distribution<double> kk(-10.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double om = par(rng);
        const MediumParams m(om, par(rng), std::min(par(rng), 3.9 * om));
        const double k = kk(rng);
        double kap = kk(rng);
        if (kap == 0.0) kap = 0.5;
        const double d = spectral_density(k, kap, m);
        CHECK(d > 0.0);
        CHECK(spectral_density(-k, kap, m) == d);
        CHECK(spectral_density(k, -kap, m) == d);
    }
}

TEST_CASE("coincidence and invalid inputs rejected")
{
    CHECK_THROWS_AS(wightman_EE_residue({0.0, 0.0}, unit_medium()), DomainError);
    const MediumParams lossless(1.0, 1.0, 0.0);
    CHECK_THROWS_AS(wightman_EE_residue({0.1, 0.2}, lossless), DomainError);
}

TEST_CASE("free-field limit at small space-like separation")
{
    // weak coupling, separation well inside 1/Omega
    const MediumParams m(1.0, 0.2, 0.1);
    const SpacetimeInterval iv{0.015, 0.05};
    const CorrelatorValue w = wightman_EE_residue(iv, m);
    CHECK(w.converged);
    const double free_val = free_field_EE(iv);
    CHECK_THAT(w.value.real(), WithinRel(free_val, 0.05));
    CHECK(std::abs(w.value.imag()) < 0.01 * std::abs(free_val));
}

TEST_CASE("g = 0 reproduces the free field exactly")
{
    const MediumParams vac(1.0, 0.0, 0.2);
    for (const SpacetimeInterval iv : {SpacetimeInterval{0.2, 0.9}, {0.0, 1.4}, {0.4, 2.0}}) {
        const CorrelatorValue w = wightman_EE_residue(iv, vac);
        CHECK_THAT(w.value.real(), WithinRel(free_field_EE(iv), 1e-5));
    }
}

TEST_CASE("large-distance asymptotics and remainder decay")
{
    const MediumParams m = unit_medium();
    const double n = m.refractive_index_static();

    // G = 0 kills the sub-leading term
    const MediumParams lossless(1.0, 1.0, 0.0);
    const SpacetimeInterval far{1.0, 12.0};
    const double lead_only = asymptotic_EE(far, lossless);
    const double nx2 = n * n * far.dx * far.dx, t2 = far.dt * far.dt;
    CHECK_THAT(lead_only, WithinRel(-(nx2 + t2) / (2.0 * kPi * n * (nx2 - t2) * (nx2 - t2)), 1e-12));

    // dt = 0 reduction
    const SpacetimeInterval eq{0.0, 9.0};
    const double expect = -1.0 / (2.0 * kPi * n * n * n * eq.dx * eq.dx) -
                          m.coupling_g * m.coupling_g * m.coupling_G_sq /
                              (kPi * std::pow(m.omega_res, 4) * std::pow(n, 6) *
                               std::pow(std::abs(eq.dx), 3));
    CHECK_THAT(asymptotic_EE(eq, m), WithinRel(expect, 1e-12));

    // medium-cone pole
    CHECK_THROWS_AS(asymptotic_EE({n * 5.0, 5.0}, m), DomainError);

    // numeric minus asymptotic decays with fitted exponent >= 3.5
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int npts = 0;
    for (double dx : {8.0, 16.0, 32.0, 64.0}) {
        const SpacetimeInterval iv{0.5 * dx, dx};
        const CorrelatorValue w = wightman_EE_residue(iv, m);
        REQUIRE(w.converged);
        const double resid = std::abs(w.value.real() - asymptotic_EE(iv, m));
        const double lx = std::log(dx), ly = std::log(resid);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++npts;
    }
    const double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
    CHECK(-slope >= 3.5);
}

TEST_CASE("hermiticity and x-parity")
{
    const MediumParams m = unit_medium();
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> sep(0.2, 2.5);
    for (int i = 0; i < 4; ++i) {
        const SpacetimeInterval iv{sep(rng), sep(rng)};
        const cplx w = wightman_EE_residue(iv, m).value;
        const cplx winv = wightman_EE_residue({-iv.dt, -iv.dx}, m).value;
        CHECK_THAT(winv.real(), WithinRel(w.real(), 1e-5));
        CHECK_THAT(winv.imag(), WithinAbs(-w.imag(), 1e-5 * std::abs(w)));
        const cplx wflip = wightman_EE_residue({iv.dt, -iv.dx}, m).value;
        CHECK_THAT(wflip.real(), WithinRel(w.real(), 1e-6));
        CHECK_THAT(wflip.imag(), WithinRel(w.imag(), 1e-6));
    }
}

TEST_CASE("residue and direct methods agree")
{
    const MediumParams m = unit_medium();
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> sep(0.3, 2.0);
    for (int i = 0; i < 4; ++i) {
        const double dx = sep(rng);
        const double dt = (i % 2 == 0) ? 0.4 * dx : 1.1 * dx;  // space- and time-like
        const SpacetimeInterval iv{dt, dx};
        const CorrelatorValue a = wightman_EE_residue(iv, m);
        const CorrelatorValue b = wightman_EE(iv, m);
        CHECK(a.converged);
        CHECK(b.converged);
        CHECK(std::abs(a.value - b.value) < 1e-3 * std::abs(a.value));
    }
}

TEST_CASE("commutator: locality, activity inside the cone, antisymmetry")
{
    const MediumParams m = unit_medium();

    // space-like: commutator vanishes within numerical tolerance
    const SpacetimeInterval sl{0.3, 1.0};
    const CorrelatorValue cs = commutator_EE(sl, m);
    const double scale = std::abs(wightman_EE_residue(sl, m).value);
    CHECK(std::abs(cs.value) < 1e-5 * scale);

    // time-like: nonzero
    const double n = m.refractive_index_static();
    const SpacetimeInterval tl{2.0 * n, 1.0};
    const CorrelatorValue ct = commutator_EE(tl, m);
    const double tscale = std::abs(wightman_EE_residue(tl, m).value);
    CHECK(std::abs(ct.value) > 0.05 * tscale);

    // inversion flips the sign
    const CorrelatorValue cti = commutator_EE({-tl.dt, -tl.dx}, m);
    CHECK_THAT(cti.value.imag(), WithinRel(-ct.value.imag(), 1e-4));
}

TEST_CASE("cluster property along a space-like ray")
{
    const MediumParams si = silicon();
    QuadratureConfig cfg;
    ClusterRay ray;
    ray.dt_over_dx = 0.0;
    ray.dx_start = 8.0 / si.omega_res;
    ray.growth = 1.6;
    ray.n_points = 7;
    const ClusterReport rep = cluster_check(si, cfg, ray);
    CHECK(rep.monotone_decay);
    CHECK(rep.fitted_exponent > -2.3);
    CHECK(rep.fitted_exponent < -1.7);
    const double n = si.refractive_index_static();
    CHECK_THAT(rep.prefactor_estimate, WithinRel(1.0 / (2.0 * kPi * n * n * n), 0.05));

    // free field: exponent -2 and prefactor 1/(2 pi)
    const MediumParams vac(1.0, 0.0, 0.2);
    ClusterRay fray;
    fray.dt_over_dx = 0.0;
    fray.dx_start = 3.0;
    fray.n_points = 6;
    const ClusterReport frep = cluster_check(vac, cfg, fray);
    CHECK_THAT(frep.fitted_exponent, WithinAbs(-2.0, 0.02));
    CHECK_THAT(frep.prefactor_estimate, WithinRel(1.0 / (2.0 * kPi), 1e-3));

    CHECK_THROWS_AS(cluster_check(si, cfg, ClusterRay{1.2, 1.0, 1.6, 6}), DomainError);
}

TEST_CASE("no Lorentz invariance: boosted interval gives a different value")
{
    const MediumParams m = unit_medium();
    const SpacetimeInterval iv{0.4, 1.0};
    const SpacetimeInterval ivb = boosted_interval(iv, 0.5);
    const cplx w = wightman_EE_residue(iv, m).value;
    const cplx wb = wightman_EE_residue(ivb, m).value;
    CHECK(std::abs(w - wb) > 0.05 * (std::abs(w) + std::abs(wb)));

    // sanity: the free field *is* boost invariant on these points
    const MediumParams vac(1.0, 0.0, 0.2);
    const cplx f = wightman_EE_residue(iv, vac).value;
    const cplx fb = wightman_EE_residue(ivb, vac).value;
    CHECK(std::abs(f - fb) < 1e-4 * std::abs(f));
}

TEST_CASE("spectrum condition is violated: weight outside the light cone")
{
    const MediumParams m = unit_medium();
    const double frac = spectral_weight_outside_cone(m, 0.3, 0.9);
    CHECK(frac > 0.1);
    CHECK(frac < 1.0);
    CHECK_THROWS_AS(spectral_weight_outside_cone(m, 0.9, 0.3), DomainError);
}
