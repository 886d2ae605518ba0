#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ginzburg/correlator.hpp"
#include "ginzburg/detector1d.hpp"
#include "ginzburg/detector3d.hpp"
#include "ginzburg/errors.hpp"
#include "ginzburg/experiment.hpp"
#include "ginzburg/medium.hpp"
#include "ginzburg/surface.hpp"
#include "ginzburg/version.hpp"

// Command-line front end: subcommand dispatch, JSON config handling, CSV/JSON
// emission.  Outputs are deterministic (fixed "%.12g" formatting, ordered
// keys, index-ordered sweep rows) and carry a provenance header with the
// artifact version and the full effective config.

namespace ginzburg::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 2,
    exit_numerical = 3,
    exit_infeasible = 4,
};

struct RunConfig {
    std::string subcommand;
    nlohmann::json config;
    std::string out_path;       // empty: write to the stream passed to run()
    std::string format = "csv"; // csv | json
};

namespace cli_detail {

inline std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace cli_detail

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Labeled y-series sharing one x column; the plot-data export format.
struct PlotSeries {
    std::string label;
    std::vector<double> y;
};

/// CSV with one x column and one column per series.  Equal lengths required;
/// an empty series list produces a header-only file.
inline void emit_plot_data(const std::vector<double>& x, const std::vector<PlotSeries>& series,
                           std::ostream& out)
{
    out << "x";
    for (const auto& s : series) {
        if (s.y.size() != x.size())
            throw DomainError("emit_plot_data: series '" + s.label + "' length mismatch");
        out << "," << s.label;
    }
    out << "\n";
    if (series.empty()) return;
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << cli_detail::fmt(x[i]);
        for (const auto& s : series) out << "," << cli_detail::fmt(s.y[i]);
        out << "\n";
    }
}

inline void emit_plot_data_file(const std::vector<double>& x,
                                const std::vector<PlotSeries>& series, const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("emit_plot_data: cannot open '" + path + "'");
    emit_plot_data(x, series, f);
}

namespace cli_detail {

inline void write_provenance_csv(std::ostream& out, const RunConfig& rc)
{
    out << "# ginzburg " << version_string << "\n";
    out << "# subcommand = " << rc.subcommand << "\n";
    out << "# config = " << rc.config.dump() << "\n";
}

inline void write_table_csv(std::ostream& out, const RunConfig& rc, const Table& t)
{
    write_provenance_csv(out, rc);
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out << (i ? "," : "") << t.columns[i];
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << fmt(row[i]);
        out << "\n";
    }
}

inline nlohmann::json meta_json(const RunConfig& rc)
{
    return nlohmann::json{{"version", version_string},
                          {"subcommand", rc.subcommand},
                          {"config", rc.config}};
}

inline void write_table(std::ostream& out, const RunConfig& rc, const Table& t)
{
    if (rc.format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : t.rows) {
            nlohmann::json r;
            for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = row[i];
            rows.push_back(r);
        }
        nlohmann::json doc{{"meta", meta_json(rc)}, {"rows", rows}};
        out << doc.dump(2) << "\n";
    } else {
        write_table_csv(out, rc, t);
    }
}

inline QuadratureConfig quad_from_json(const nlohmann::json& cfg)
{
    QuadratureConfig q;
    if (!cfg.contains("quad")) return q;
    const auto& j = cfg.at("quad");
    if (j.contains("rel_tol")) q.rel_tol = j.at("rel_tol").get<double>();
    if (j.contains("abs_tol")) q.abs_tol = j.at("abs_tol").get<double>();
    if (j.contains("max_subdivisions")) q.max_subdivisions = j.at("max_subdivisions").get<int>();
    if (j.contains("epsilon_regulator")) q.epsilon_regulator = j.at("epsilon_regulator").get<double>();
    if (j.contains("tail_cutoff")) q.tail_cutoff = j.at("tail_cutoff").get<double>();
    if (j.contains("use_richardson")) q.use_richardson = j.at("use_richardson").get<bool>();
    q.validate();
    return q;
}

inline int thread_count()
{
    if (const char* env = std::getenv("GINZBURG_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

/// Deterministic parallel map: out[i] = f(i), ordering fixed by index.
template <class F>
void parallel_for(std::size_t n, F&& f)
{
    const int nt = std::min<std::size_t>(thread_count(), n ? n : 1);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
        });
    for (auto& th : pool) th.join();
}

// --- subcommands ---------------------------------------------------------

inline int cmd_dispersion(const RunConfig& rc, std::ostream& out)
{
    const auto& cfg = rc.config;
    const MediumParams m = medium_from_json(cfg.at("medium"));
    const double lo = cfg.value("kappa_min_eV", 0.01 * m.omega_res);
    const double hi = cfg.value("kappa_max_eV", 3.0 * m.omega_res);
    const int npts = cfg.value("points", 200);
    if (!(lo > 0.0 && hi > lo) || npts < 1)
        throw DomainError("dispersion: need 0 < kappa_min_eV < kappa_max_eV, points >= 1");

    Table t;
    t.columns = {"kappa_eV", "eps_re", "eps_im", "k_re_eV", "k_im_eV", "n_re", "n_im",
                 "phase_velocity_c"};
    for (int i = 0; i < npts; ++i) {
        const double kap = npts == 1 ? lo : lo + (hi - lo) * i / (npts - 1);
        const auto eps = permittivity(kap, m);
        const auto k = complex_wavenumber(kap, m);
        const auto n = refractive_index(kap, m);
        t.rows.push_back({kap, eps.real(), eps.imag(), k.real(), k.imag(), n.real(), n.imag(),
                          phase_velocity(kap, m)});
    }
    write_table(out, rc, t);
    return exit_ok;
}

inline int cmd_correlator(const RunConfig& rc, std::ostream& out)
{
    const auto& cfg = rc.config;
    const MediumParams m = medium_from_json(cfg.at("medium"));
    const QuadratureConfig q = quad_from_json(cfg);
    const bool direct = cfg.value("method", std::string("residue")) == "direct";

    std::vector<SpacetimeInterval> pts;
    for (const auto& p : cfg.at("points")) {
        if (!p.is_array() || p.size() != 2)
            throw DomainError("correlator: points must be [dt_over_eV, dx_over_eV] pairs");
        pts.push_back({p[0].get<double>(), p[1].get<double>()});
    }

    Table t;
    t.columns = {"dt", "dx", "re_w", "im_w", "eps_used", "converged"};
    t.rows.resize(pts.size());
    bool all_converged = true;
    parallel_for(pts.size(), [&](std::size_t i) {
        const CorrelatorValue w =
            direct ? wightman_EE(pts[i], m, q) : wightman_EE_residue(pts[i], m, q);
        t.rows[i] = {pts[i].dt,       pts[i].dx,          w.value.real(),
                     w.value.imag(),  w.epsilon_used,     w.converged ? 1.0 : 0.0};
    });
    for (const auto& r : t.rows)
        if (r[5] == 0.0) all_converged = false;
    write_table(out, rc, t);
    return all_converged ? exit_ok : exit_numerical;
}

inline int cmd_rate1d(const RunConfig& rc, std::ostream& out)
{
    const auto& cfg = rc.config;
    const MediumParams m = medium_from_json(cfg.at("medium"));
    const QuadratureConfig q = quad_from_json(cfg);
    const auto& dj = cfg.at("detector");
    const double gap = dj.at("gap_eV").get<double>();
    const double lambda = dj.value("lambda", 1.0);

    std::vector<double> velocities;
    if (dj.contains("velocity_c")) velocities.push_back(dj.at("velocity_c").get<double>());
    if (cfg.contains("velocities_c"))
        for (const auto& v : cfg.at("velocities_c")) velocities.push_back(v.get<double>());
    if (velocities.empty())
        throw DomainError("rate1d: need detector.velocity_c or velocities_c");

    Table t;
    t.columns = {"v", "omega_eV", "rate_exact", "rate_smallv", "rate_weakG", "err_estimate"};
    t.rows.resize(velocities.size());
    bool all_converged = true;
    parallel_for(velocities.size(), [&](std::size_t i) {
        const DetectorSpec1D d(gap, lambda, velocities[i]);
        const RateResult re = excitation_rate_exact(d, m, q);
        const RateResult rs = excitation_rate_smallv(d, m, q);
        const RateResult rw = excitation_rate_weakG(d, m);
        t.rows[i] = {velocities[i], gap, re.value, rs.value, rw.value, re.error_estimate};
        if (!re.converged || !rs.converged) t.rows[i][5] = -1.0;
    });
    for (const auto& r : t.rows)
        if (r[5] < 0.0) all_converged = false;
    write_table(out, rc, t);
    return all_converged ? exit_ok : exit_numerical;
}

inline int cmd_rate3d(const RunConfig& rc, std::ostream& out)
{
    const auto& cfg = rc.config;
    const MediumParams m = medium_from_json(cfg.at("medium"));
    const auto& dj = cfg.at("detector");
    const DetectorSpec3D d(dj.at("gap_eV").get<double>(), dipoles_from_json(dj.at("dipoles_ea0")),
                           dj.at("velocity_c").get<double>());
    const bool with_exact = cfg.value("exact", false);
    const QuadratureConfig q = quad_from_json(cfg);

    Table t;
    t.columns = {"v", "omega_eV", "rate_closed", "rate_cutoff", "eta_min", "rate_exact",
                 "rate_per_s", "rate_per_cm"};
    const RateResult closed = excitation_rate_3d_closed(d, m);
    double cutoff_rate = closed.value;
    double em = 0.0;
    CutoffSpec cut;
    if (cfg.contains("cutoff_eV")) {
        cut = CutoffSpec(cfg.at("cutoff_eV").get<double>());
        cutoff_rate = excitation_rate_3d_cutoff(d, m, cut).value;
        em = d.velocity != 0.0 ? eta_min(d.gap, m, d.velocity, *cut.k_max) : 0.0;
    }
    double exact = 0.0;
    bool conv = true;
    if (with_exact) {
        const RateResult r = excitation_rate_3d_exact(d, m, cut, q);
        exact = r.value;
        conv = r.converged;
    }
    const SiRate si = rate_to_si(cutoff_rate, rate3d_unit_context(), d.velocity);
    t.rows.push_back({d.velocity, d.gap, closed.value, cutoff_rate, em, exact, si.per_second,
                      si.per_cm});
    write_table(out, rc, t);
    return conv ? exit_ok : exit_numerical;
}

inline int cmd_surface(const RunConfig& rc, std::ostream& out)
{
    const auto& cfg = rc.config;
    const MediumParams m = medium_from_json(cfg.at("medium"));
    const double gap = cfg.at("gap_eV").get<double>();
    const double kmax = cfg.at("cutoff_eV").get<double>();

    const double vmin = min_velocity(gap, m, kmax);
    const double ell = efolding_length(kmax, m);

    Table t;
    t.columns = {"k_z_eV", "efolding_nm", "v_min_c", "distance_nm", "suppression",
                 "hole_radius_mm", "beam_avg_suppression"};
    std::vector<double> kzs;
    if (cfg.contains("k_z_eV"))
        for (const auto& k : cfg.at("k_z_eV")) kzs.push_back(k.get<double>());
    else
        kzs.push_back(kmax);
    std::vector<double> dists = {0.0, ell, 3.0 * ell};
    if (cfg.contains("distances_nm")) {
        dists.clear();
        for (const auto& x : cfg.at("distances_nm")) dists.push_back(x.get<double>());
    }
    std::vector<double> radii = {0.5};
    if (cfg.contains("radii_mm")) {
        radii.clear();
        for (const auto& x : cfg.at("radii_mm")) radii.push_back(x.get<double>());
    }
    const std::size_t nrow = std::max({kzs.size(), dists.size(), radii.size()});
    for (std::size_t i = 0; i < nrow; ++i) {
        const double kz = kzs[std::min(i, kzs.size() - 1)];
        const double dd = dists[std::min(i, dists.size() - 1)];
        const double rr = radii[std::min(i, radii.size() - 1)];
        const double li = efolding_length(kz, m);
        t.rows.push_back({kz, li, vmin, dd, suppression_at_distance(dd, li), rr,
                          beam_average_suppression(rr, li)});
    }
    write_table(out, rc, t);
    return exit_ok;
}

inline int cmd_experiment(const RunConfig& rc, std::ostream& out)
{
    const ExperimentScenario s = scenario_from_json(rc.config);
    const ExperimentReport rep = plan_experiment(s);
    if (rc.format == "json") {
        nlohmann::json doc{{"meta", meta_json(rc)}, {"report", report_to_json(rep)}};
        out << doc.dump(2) << "\n";
    } else {
        Table t;
        t.columns = {"feasible", "v_min_c", "eta_min", "cutoff_prefactor", "rate_bulk_per_cm",
                     "efolding_nm", "suppression", "excited_per_s_per_cm", "excited_per_s_path"};
        t.rows.push_back({rep.feasible ? 1.0 : 0.0, rep.v_min, rep.eta_min, rep.cutoff_prefactor,
                          rep.rate_bulk_per_cm, rep.efolding_nm, rep.suppression,
                          rep.excited_per_s_per_cm, rep.excited_per_s_path});
        write_table_csv(out, rc, t);
        out << "# " << rep.bulk_rate_note << "\n";
        if (!rep.diagnostic.empty()) out << "# " << rep.diagnostic << "\n";
    }
    return rep.feasible ? exit_ok : exit_infeasible;
}

inline int cmd_sweep(const RunConfig& rc, std::ostream& out)
{
    const auto& cfg = rc.config;
    const MediumParams m = medium_from_json(cfg.at("medium"));
    const auto& dj = cfg.at("detector");
    const double gap = dj.at("gap_eV").get<double>();
    const auto dip = dipoles_from_json(dj.at("dipoles_ea0"));
    const double kmax = cfg.at("cutoff_eV").get<double>();

    const auto& sw = cfg.at("sweep");
    std::vector<double> vs;
    if (sw.contains("values")) {
        for (const auto& v : sw.at("values")) vs.push_back(v.get<double>());
    } else {
        const double from = sw.at("from").get<double>();
        const double to = sw.at("to").get<double>();
        const double step = sw.at("step").get<double>();
        if (!(step > 0.0) || to < from)
            throw DomainError("sweep: need step > 0 and to >= from");
        for (double v = from; v <= to + 0.5 * step; v += step) vs.push_back(v);
    }

    Table t;
    t.columns = {"v", "eta_min", "cutoff_prefactor", "rate_cutoff", "rate_per_s", "rate_per_cm"};
    t.rows.resize(vs.size());
    parallel_for(vs.size(), [&](std::size_t i) {
        const DetectorSpec3D d(gap, dip, vs[i]);
        const double em = vs[i] != 0.0 ? eta_min(gap, m, vs[i], kmax)
                                       : std::numeric_limits<double>::infinity();
        const RateResult r = excitation_rate_3d_cutoff(d, m, CutoffSpec(kmax));
        const SiRate si = rate_to_si(r.value, rate3d_unit_context(), vs[i]);
        t.rows[i] = {vs[i], em, cutoff_prefactor_xy(std::isfinite(em) ? em : 2.0), r.value,
                     si.per_second, si.per_cm};
    });
    write_table(out, rc, t);
    return exit_ok;
}

}  // namespace cli_detail

/// Dotted-path config override: "a.b.c=value"; the value is parsed as JSON
/// when possible and falls back to a plain string.
inline void apply_override(nlohmann::json& cfg, const std::string& kv)
{
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
        throw DomainError("--set expects key.path=value, got '" + kv + "'");
    const std::string path = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error&) {
        value = raw;  // plain string
    }
    nlohmann::json* node = &cfg;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty())
            throw DomainError("--set: empty key segment in '" + path + "'");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

/// Dispatch a parsed run configuration; returns the process exit code and
/// writes the artifact to rc.out_path (or `fallback` when no path is set).
inline int run(const RunConfig& rc, std::ostream& fallback, std::ostream& errs)
{
    std::ostringstream body;
    int code = exit_ok;
    try {
        if (rc.format != "csv" && rc.format != "json")
            throw DomainError("format must be csv or json");
        if (rc.subcommand == "dispersion") code = cli_detail::cmd_dispersion(rc, body);
        else if (rc.subcommand == "correlator") code = cli_detail::cmd_correlator(rc, body);
        else if (rc.subcommand == "rate1d") code = cli_detail::cmd_rate1d(rc, body);
        else if (rc.subcommand == "rate3d") code = cli_detail::cmd_rate3d(rc, body);
        else if (rc.subcommand == "surface") code = cli_detail::cmd_surface(rc, body);
        else if (rc.subcommand == "experiment") code = cli_detail::cmd_experiment(rc, body);
        else if (rc.subcommand == "sweep") code = cli_detail::cmd_sweep(rc, body);
        else throw DomainError("unknown subcommand '" + rc.subcommand + "'");
    } catch (const InfeasibleError& e) {
        errs << "infeasible: " << e.what() << "\n";
        return exit_infeasible;
    } catch (const ParseError& e) {
        errs << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const DomainError& e) {
        errs << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const CalibrationError& e) {
        errs << "numerical error: " << e.what() << "\n";
        return exit_numerical;
    } catch (const nlohmann::json::exception& e) {
        errs << "config error: " << e.what() << "\n";
        return exit_config_error;
    }

    if (rc.out_path.empty()) {
        fallback << body.str();
    } else {
        std::ofstream f(rc.out_path, std::ios::binary);
        if (!f) {
            errs << "cannot open output path '" << rc.out_path << "'\n";
            return exit_config_error;
        }
        f << body.str();
    }
    return code;
}

}  // namespace ginzburg::cli
