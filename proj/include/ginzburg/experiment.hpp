#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ginzburg/detector3d.hpp"
#include "ginzburg/errors.hpp"
#include "ginzburg/hydrogen.hpp"
#include "ginzburg/medium.hpp"
#include "ginzburg/surface.hpp"

// End-to-end planner for the silicon/hydrogen scenario: optical-data
// ingestion, Lorentz-parameter fitting, and the count-rate pipeline
// cutoff rate -> SI -> per-cm -> beam-averaged suppression -> flux.

namespace ginzburg {

// --- optical data ----------------------------------------------------------

struct OpticalRow {
    double energy_eV = 0.0;
    double n_real = 0.0;
    double n_imag = 0.0;
};

struct OpticalDataSet {
    std::vector<OpticalRow> rows;
    std::string source;
};

/// CSV with header `energy_eV,n,k`; `#` starts a comment line.  Energies must
/// be strictly increasing, n > 0, k >= 0.
inline OpticalDataSet load_optical_data(std::istream& in, const std::string& source = "")
{
    OpticalDataSet data;
    data.source = source;
    std::string line;
    long lineno = 0;
    bool header_seen = false;
    auto strip = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = strip(line);
        if (t.empty() || t[0] == '#') continue;
        if (!header_seen) {
            std::string h = t;
            h.erase(std::remove_if(h.begin(), h.end(),
                                   [](char c) { return c == ' ' || c == '\t'; }),
                    h.end());
            if (h != "energy_eV,n,k")
                throw ParseError("load_optical_data: expected header 'energy_eV,n,k'", lineno);
            header_seen = true;
            continue;
        }
        std::istringstream ss(t);
        std::string cell;
        double vals[3];
        for (int i = 0; i < 3; ++i) {
            if (!std::getline(ss, cell, ','))
                throw ParseError("load_optical_data: expected 3 comma-separated values", lineno);
            std::size_t pos = 0;
            try {
                vals[i] = std::stod(strip(cell), &pos);
            } catch (const std::exception&) {
                throw ParseError("load_optical_data: malformed number '" + cell + "'", lineno);
            }
            if (pos != strip(cell).size())
                throw ParseError("load_optical_data: trailing junk in '" + cell + "'", lineno);
        }
        if (std::getline(ss, cell, ','))
            throw ParseError("load_optical_data: more than 3 columns", lineno);
        if (!data.rows.empty() && !(vals[0] > data.rows.back().energy_eV))
            throw ParseError("load_optical_data: energies must be strictly increasing", lineno);
        if (!(vals[1] > 0.0))
            throw ParseError("load_optical_data: n must be positive", lineno);
        if (!(vals[2] >= 0.0))
            throw ParseError("load_optical_data: k must be nonnegative", lineno);
        data.rows.push_back({vals[0], vals[1], vals[2]});
    }
    if (!header_seen)
        throw ParseError("load_optical_data: missing header 'energy_eV,n,k'");
    if (data.rows.empty())
        throw ParseError("load_optical_data: no data rows");
    return data;
}

inline OpticalDataSet load_optical_data_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("load_optical_data: cannot open '" + path + "'");
    return load_optical_data(in, path);
}

/// Serialize with full double precision (round-trips bit-exactly).
inline void save_optical_data(const OpticalDataSet& data, std::ostream& out)
{
    out << "energy_eV,n,k\n";
    char buf[96];
    for (const auto& r : data.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.energy_eV, r.n_real, r.n_imag);
        out << buf;
    }
}

/// Synthetic dataset from the medium model: n(omega) = sqrt(eps(omega)).
inline OpticalDataSet synthetic_optical_data(const MediumParams& m,
                                             const std::vector<double>& energies)
{
    OpticalDataSet d;
    d.source = "synthetic";
    for (double e : energies) {
        const auto n = refractive_index(e, m);
        d.rows.push_back({e, n.real(), n.imag()});
    }
    return d;
}

// --- Lorentz-parameter fit -------------------------------------------------

struct FitReport {
    double residual_norm = 0.0;         // sqrt(sum of squared residuals)
    int iterations = 0;
    bool converged = false;
    std::array<double, 3> sensitivity{};  // ||d residuals / d p_i||_2
};

namespace fit_detail {

inline bool params_valid(const std::array<double, 3>& p)
{
    return p[0] > 0.0 && p[1] >= 0.0 && p[2] >= 0.0 && p[2] < 4.0 * p[0];
}

inline double residuals(const OpticalDataSet& data, const std::array<double, 3>& p,
                        std::vector<double>& r)
{
    r.resize(2 * data.rows.size());
    if (!params_valid(p)) return std::numeric_limits<double>::infinity();
    double ss = 0.0;
    try {
        const MediumParams m(p[0], p[1], p[2]);
        for (std::size_t i = 0; i < data.rows.size(); ++i) {
            const auto n = refractive_index(data.rows[i].energy_eV, m);
            r[2 * i] = n.real() - data.rows[i].n_real;
            r[2 * i + 1] = n.imag() - data.rows[i].n_imag;
            ss += r[2 * i] * r[2 * i] + r[2 * i + 1] * r[2 * i + 1];
        }
    } catch (const DomainError&) {
        return std::numeric_limits<double>::infinity();
    }
    return ss;
}

}  // namespace fit_detail

/// Levenberg-Marquardt least squares of sqrt(eps) against measured complex n
/// over (Omega, g, G^2).  Uniform row weights; deterministic for fixed input.
/// Non-convergence after the iteration cap returns best-so-far with
/// converged = false.
inline std::pair<MediumParams, FitReport>
fit_lorentz_params(const OpticalDataSet& data, const MediumParams& init)
{
    if (data.rows.size() < 5)
        throw DomainError("fit_lorentz_params: need at least 5 data rows");

    std::array<double, 3> p{init.omega_res, init.coupling_g, init.coupling_G_sq};
    std::vector<double> r, rp, rm, rt;
    double cost = fit_detail::residuals(data, p, r);
    if (!std::isfinite(cost))
        throw DomainError("fit_lorentz_params: initial parameters invalid");

    const std::size_t nres = r.size();
    std::array<std::vector<double>, 3> J;
    double lambda = 1e-3;
    FitReport rep;
    const int max_iter = 200;

    for (rep.iterations = 0; rep.iterations < max_iter; ++rep.iterations) {
        // central-difference Jacobian
        for (int j = 0; j < 3; ++j) {
            const double h = std::max(1e-7 * std::abs(p[j]), 1e-10);
            auto pp = p, pm = p;
            pp[j] += h;
            pm[j] = std::max(pm[j] - h, j == 0 ? 1e-12 : 0.0);
            const double denom = pp[j] - pm[j];
            fit_detail::residuals(data, pp, rp);
            fit_detail::residuals(data, pm, rm);
            J[j].resize(nres);
            for (std::size_t i = 0; i < nres; ++i) J[j][i] = (rp[i] - rm[i]) / denom;
        }
        double jtj[3][3], jtr[3];
        for (int a = 0; a < 3; ++a) {
            jtr[a] = 0.0;
            for (std::size_t i = 0; i < nres; ++i) jtr[a] += J[a][i] * r[i];
            for (int b = 0; b < 3; ++b) {
                jtj[a][b] = 0.0;
                for (std::size_t i = 0; i < nres; ++i) jtj[a][b] += J[a][i] * J[b][i];
            }
        }
        for (int j = 0; j < 3; ++j)
            rep.sensitivity[j] = std::sqrt(jtj[j][j]);

        const double grad_norm = std::sqrt(jtr[0] * jtr[0] + jtr[1] * jtr[1] + jtr[2] * jtr[2]);
        if (grad_norm < 1e-14 * (1.0 + cost)) {
            rep.converged = true;
            break;
        }

        bool stepped = false;
        for (int tries = 0; tries < 40 && !stepped; ++tries) {
            double a[3][4];
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) a[i][j] = jtj[i][j];
                a[i][i] *= 1.0 + lambda;
                a[i][3] = -jtr[i];
            }
            // 3x3 Gaussian elimination with partial pivoting
            bool singular = false;
            for (int col = 0; col < 3; ++col) {
                int piv = col;
                for (int row = col + 1; row < 3; ++row)
                    if (std::abs(a[row][col]) > std::abs(a[piv][col])) piv = row;
                if (std::abs(a[piv][col]) < 1e-300) {
                    singular = true;
                    break;
                }
                if (piv != col)
                    for (int j = 0; j < 4; ++j) std::swap(a[piv][j], a[col][j]);
                for (int row = col + 1; row < 3; ++row) {
                    const double f = a[row][col] / a[col][col];
                    for (int j = col; j < 4; ++j) a[row][j] -= f * a[col][j];
                }
            }
            std::array<double, 3> step{};
            if (!singular) {
                for (int i = 2; i >= 0; --i) {
                    double s = a[i][3];
                    for (int j = i + 1; j < 3; ++j) s -= a[i][j] * step[j];
                    step[i] = s / a[i][i];
                }
            }
            std::array<double, 3> ptrial{p[0] + step[0], p[1] + step[1], p[2] + step[2]};
            ptrial[1] = std::max(ptrial[1], 0.0);
            ptrial[2] = std::max(ptrial[2], 0.0);
            const double ctrial = singular ? std::numeric_limits<double>::infinity()
                                           : fit_detail::residuals(data, ptrial, rt);
            if (ctrial < cost) {
                const double dp = std::sqrt(step[0] * step[0] + step[1] * step[1] +
                                            step[2] * step[2]);
                p = ptrial;
                r = rt;
                const double improvement = cost - ctrial;
                cost = ctrial;
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
                if (improvement < 1e-24 * (1.0 + cost) && dp < 1e-12 * (1.0 + std::abs(p[0])))
                    rep.converged = true;
            } else {
                lambda *= 4.0;
            }
        }
        if (!stepped || rep.converged) {
            rep.converged = rep.converged || !stepped;
            break;
        }
    }
    rep.residual_norm = std::sqrt(cost);
    return {MediumParams(p[0], p[1], std::min(p[2], 4.0 * p[0] * (1.0 - 1e-12))), rep};
}

// --- scenario and planner --------------------------------------------------

struct ExperimentScenario {
    MediumParams medium;
    double cutoff_eV;          // k_max
    DetectorSpec3D detector;
    SurfaceGeometry geometry;
    double beam_flux_per_s;    // metastable atoms per second
    double path_cm;

    ExperimentScenario(MediumParams m, double kmax, DetectorSpec3D det, SurfaceGeometry geo,
                       double flux, double path)
        : medium(m), cutoff_eV(kmax), detector(det), geometry(geo),
          beam_flux_per_s(flux), path_cm(path)
    {
        if (!(kmax > 0.0))
            throw DomainError("ExperimentScenario: cutoff_eV must be positive");
        if (!(flux >= 0.0))
            throw DomainError("ExperimentScenario: beam flux must be >= 0");
        if (!(path > 0.0))
            throw DomainError("ExperimentScenario: path_cm must be positive");
    }
};

// fixed scenario context, not modeled
inline constexpr double lyman_beta_propagation_m = 1.3;
inline constexpr double metastable_2s_lifetime_s = 0.1;

struct ExperimentReport {
    bool feasible = false;
    std::string diagnostic;

    double v_min = 0.0;
    double eta_min = 0.0;
    double cutoff_prefactor = 0.0;
    double rate_bulk_natural = 0.0;    // cutoff closed form, natural units
    double rate_bulk_per_s = 0.0;      // SI
    double rate_bulk_per_cm = 0.0;     // SI, per cm of path
    double efolding_nm = 0.0;
    double suppression = 0.0;
    double excited_per_s_per_cm = 0.0;
    double excited_per_s_path = 0.0;   // scaled by path_cm

    double lyman_beta_propagation_m = ginzburg::lyman_beta_propagation_m;
    double metastable_2s_lifetime_s = ginzburg::metastable_2s_lifetime_s;
    std::string bulk_rate_note;
};

/// Count-rate pipeline.  Every number is produced by the corresponding
/// module operation; nothing is recomputed locally.
inline ExperimentReport plan_experiment(const ExperimentScenario& s)
{
    ExperimentReport rep;
    rep.v_min = min_velocity(s.detector.gap, s.medium, s.cutoff_eV);

    const double v = std::abs(s.detector.velocity);
    rep.eta_min = v > 0.0 ? eta_min(s.detector.gap, s.medium, v, s.cutoff_eV)
                          : std::numeric_limits<double>::infinity();
    rep.cutoff_prefactor = cutoff_prefactor_xy(std::isfinite(rep.eta_min) ? rep.eta_min : 2.0);
    rep.efolding_nm = efolding_length(s.cutoff_eV, s.medium);
    rep.suppression = s.geometry.kind == SurfaceGeometry::Kind::hole
                          ? beam_average_suppression(s.geometry.hole_radius_mm, rep.efolding_nm)
                          : suppression_at_distance(s.geometry.plate_distance_nm, rep.efolding_nm);

    if (v < rep.v_min) {
        rep.feasible = false;
        rep.diagnostic = "detector velocity below v_min: no mode below the cutoff satisfies "
                         "the Doppler condition; prediction is zero";
        return rep;
    }
    rep.feasible = true;

    const RateResult bulk = excitation_rate_3d_cutoff(s.detector, s.medium, CutoffSpec(s.cutoff_eV));
    rep.rate_bulk_natural = bulk.value;
    const SiRate si = rate_to_si(bulk.value, rate3d_unit_context(), s.detector.velocity);
    rep.rate_bulk_per_s = si.per_second;
    rep.rate_bulk_per_cm = si.per_cm;

    rep.excited_per_s_per_cm = si.per_cm * rep.suppression * s.beam_flux_per_s;
    rep.excited_per_s_path = rep.excited_per_s_per_cm * s.path_cm;

    char note[256];
    std::snprintf(note, sizeof note,
                  "bulk rate %.3e /cm; reference estimates for this scenario quote both 1e-3 /cm "
                  "and 1e-4 /cm (they disagree by a factor of 10)",
                  rep.rate_bulk_per_cm);
    rep.bulk_rate_note = note;
    return rep;
}

// --- JSON interface --------------------------------------------------------

inline MediumParams medium_from_json(const nlohmann::json& j)
{
    if (j.contains("g_eV") && j.contains("G_sq_eV"))
        return MediumParams(j.at("omega_eV").get<double>(), j.at("g_eV").get<double>(),
                            j.at("G_sq_eV").get<double>());
    if (j.contains("n0") && j.contains("n_res_real"))
        return calibrated_medium(j.at("omega_eV").get<double>(), j.at("n0").get<double>(),
                                 j.at("n_res_real").get<double>());
    throw ParseError("medium: need either {omega_eV,g_eV,G_sq_eV} or {omega_eV,n0,n_res_real}");
}

inline std::array<double, 3> dipoles_from_json(const nlohmann::json& j)
{
    if (j.is_string()) {
        if (j.get<std::string>() == "hydrogen_2s3p") return hydrogen::dipole_2s3p();
        throw ParseError("dipoles_ea0: unknown preset '" + j.get<std::string>() + "'");
    }
    if (!j.is_array() || j.size() != 3)
        throw ParseError("dipoles_ea0: expected [dx, dy, dz] or a preset name");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline ExperimentScenario scenario_from_json(const nlohmann::json& j)
{
    MediumParams medium = [&] {
        if (j.contains("fit_from_data")) {
            const auto& f = j.at("fit_from_data");
            OpticalDataSet data = load_optical_data_file(f.at("csv").get<std::string>());
            const MediumParams init = medium_from_json(f.at("init"));
            return fit_lorentz_params(data, init).first;
        }
        return medium_from_json(j.at("medium"));
    }();

    const auto& dj = j.at("detector");
    DetectorSpec3D det(dj.at("gap_eV").get<double>(), dipoles_from_json(dj.at("dipoles_ea0")),
                       dj.at("velocity_c").get<double>());

    const auto& gj = j.at("geometry");
    SurfaceGeometry geo = gj.contains("hole_radius_mm")
                              ? SurfaceGeometry::hole(gj.at("hole_radius_mm").get<double>())
                              : SurfaceGeometry::plate(gj.at("plate_distance_nm").get<double>());

    return ExperimentScenario(medium, j.at("cutoff_eV").get<double>(), det, geo,
                              j.at("beam_flux_per_s").get<double>(),
                              j.at("path_cm").get<double>());
}

inline nlohmann::json report_to_json(const ExperimentReport& r)
{
    return nlohmann::json{{"feasible", r.feasible},
                          {"diagnostic", r.diagnostic},
                          {"v_min_c", r.v_min},
                          {"eta_min", r.eta_min},
                          {"cutoff_prefactor", r.cutoff_prefactor},
                          {"rate_bulk_natural", r.rate_bulk_natural},
                          {"rate_bulk_per_s", r.rate_bulk_per_s},
                          {"rate_bulk_per_cm", r.rate_bulk_per_cm},
                          {"efolding_nm", r.efolding_nm},
                          {"suppression", r.suppression},
                          {"excited_per_s_per_cm", r.excited_per_s_per_cm},
                          {"excited_per_s_path", r.excited_per_s_path},
                          {"lyman_beta_propagation_m", r.lyman_beta_propagation_m},
                          {"metastable_2s_lifetime_s", r.metastable_2s_lifetime_s},
                          {"bulk_rate_note", r.bulk_rate_note}};
}

}  // namespace ginzburg
