// Configuration-driven laboratory for Neumann eigenproblems on thin curved
// strips: builds the Fermi-coordinate metric, assembles the weighted forms,
// solves for the low eigenpairs, and emits machine-readable reports.
//
// Subcommands: validate | spectrum | hotspots | sweep
// Exit codes:  0 ok, 1 a theorem verdict failed, 2 config error, 3 runtime error.

#include "strips/analysis.hpp"
#include "strips/forms.hpp"
#include "strips/geometry.hpp"
#include "strips/presets.hpp"
#include "strips/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct RunConfig {
    strips::StripGeometry geometry;
    std::string geometry_name;
    std::vector<double> eps_list; // single entry unless sweeping
    int N = 4;
    int n_s = 256;
    int n_t = 9;
    double solver_tol = 1e-10;
    double flat_top_tol = 1e-6;
    double grad_tol = 1e-3;
    std::optional<double> delta_override;
    std::vector<std::string> observables = {"eigenvalue_error"};
    unsigned seed = 42;
    std::string run_id;
};

// FNV-1a over the canonical config text; deterministic run identifier
std::string hash_id(const std::string& text, unsigned seed) {
    uint64_t h = 1469598103934665603ull ^ seed;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunConfig load_config(const std::string& path, unsigned seed_override, bool seed_given) {
    std::ifstream in(path);
    if (!in)
        throw strips::ConfigError("cannot open config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw strips::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    RunConfig rc;
    const json geo = cfg.value("geometry", json::object());
    const double L = geo.value("L", 3.141592653589793);
    if (L <= 0.0)
        throw strips::ConfigError("geometry.L must be positive");

    if (geo.contains("preset")) {
        strips::PresetParams p;
        p.L = L;
        p.curvature = geo.value("curvature", 1.0);
        rc.geometry_name = geo["preset"].get<std::string>();
        rc.geometry = strips::make_preset(rc.geometry_name, p);
    } else if (geo.contains("kappa_samples")) {
        std::vector<double> ks = geo["kappa_samples"].get<std::vector<double>>();
        std::vector<double> Ks = geo.value("gauss_samples", std::vector<double>{0.0});
        rc.geometry = strips::make_custom(L, std::move(ks), std::move(Ks), 0.1);
        rc.geometry_name = "custom";
    } else {
        throw strips::ConfigError("geometry needs a 'preset' name or 'kappa_samples' table");
    }

    if (cfg.contains("eps_list"))
        rc.eps_list = cfg["eps_list"].get<std::vector<double>>();
    else if (cfg.contains("epsilon"))
        rc.eps_list = {cfg["epsilon"].get<double>()};
    else
        throw strips::ConfigError("config needs 'epsilon' or 'eps_list'");
    for (double e : rc.eps_list)
        if (e <= 0.0)
            throw strips::ConfigError("every epsilon must be positive");
    rc.geometry.epsilon = rc.eps_list.front();

    rc.N = cfg.value("N", 4);
    if (rc.N < 2)
        throw strips::ConfigError("N must be at least 2");

    const json grid = cfg.value("grid", json::object());
    rc.n_s = grid.value("n_s", 256);
    rc.n_t = grid.value("n_t", 9);

    const json tols = cfg.value("tolerances", json::object());
    rc.solver_tol = tols.value("solver", 1e-10);
    rc.flat_top_tol = tols.value("flat_top", 1e-6);
    rc.grad_tol = tols.value("grad", 1e-3);

    if (cfg.contains("delta") && !cfg["delta"].is_null())
        rc.delta_override = cfg["delta"].get<double>();
    if (cfg.contains("observables"))
        rc.observables = cfg["observables"].get<std::vector<std::string>>();

    rc.seed = seed_given ? seed_override : cfg.value("seed", 42u);
    rc.run_id = hash_id(cfg.dump(), rc.seed);
    return rc;
}

// eq. rearrange plus the diffeomorphism radius; checked before any heavy work
void require_epsilon_window(const RunConfig& rc) {
    const double rearrange = rc.geometry.L / (2.0 * (rc.N - 1));
    const double tilde = strips::epsilon_tilde(rc.geometry);
    for (double e : rc.eps_list) {
        if (e >= rearrange)
            throw strips::ConfigError("epsilon = " + fmt17(e) +
                                      " violates the mode-ordering condition eps < L/(2(N-1)) = " +
                                      fmt17(rearrange));
        if (e >= tilde)
            throw strips::ConfigError("epsilon = " + fmt17(e) +
                                      " is not below the validity radius epsilon_tilde = " +
                                      fmt17(tilde));
    }
}

void dump_metric(const strips::MetricField& m, const fs::path& path) {
    std::ofstream out(path);
    for (int j = 0; j < m.grid.n_t; ++j) {
        for (int i = 0; i < m.grid.n_s; ++i)
            out << (i ? " " : "") << fmt17(m.at(i, j));
        out << "\n";
    }
}

json node_list(const std::vector<strips::NodeRef>& nodes) {
    json arr = json::array();
    for (const auto& nd : nodes)
        arr.push_back({{"i", nd.i}, {"j", nd.j}});
    return arr;
}

int cmd_validate(const RunConfig& rc, const fs::path& out_dir) {
    const strips::ValidityReport rep = strips::validate_geometry(rc.geometry);
    json j;
    j["run_id"] = rc.run_id;
    j["geometry"] = rc.geometry_name;
    j["epsilon"] = rc.geometry.epsilon;
    j["c_eps"] = rep.c_eps;
    j["eps_tilde"] = std::isinf(rep.eps_tilde) ? json("inf") : json(rep.eps_tilde);
    j["valid"] = rep.valid;
    std::ofstream(out_dir / "validity.json") << j.dump(2) << "\n";
    std::cout << j.dump(2) << "\n";
    return rep.valid ? 0 : 1;
}

int cmd_spectrum(const RunConfig& rc, const fs::path& out_dir) {
    require_epsilon_window(rc);
    const strips::MetricField metric = strips::solve_jacobi(rc.geometry, rc.n_s, rc.n_t);
    const strips::DiscreteForms forms = strips::assemble_eps(metric);
    strips::SolveOptions so;
    so.seed = rc.seed;
    const auto pairs = strips::solve_smallest(forms, rc.N, rc.solver_tol, so);

    std::ofstream csv(out_dir / "spectrum.csv");
    csv << "run_id,geometry,epsilon,n,lambda,residual,degenerate_flag\n";
    for (int n = 1; n <= rc.N; ++n) {
        const auto& p = pairs[n - 1];
        csv << rc.run_id << ',' << rc.geometry_name << ',' << fmt17(rc.geometry.epsilon) << ','
            << n << ',' << fmt17(p.value) << ',' << fmt17(p.residual) << ','
            << (p.degenerate ? 1 : 0) << "\n";
    }
    dump_metric(metric, out_dir / "metric.txt");
    std::cout << "spectrum written to " << (out_dir / "spectrum.csv").string() << "\n";
    return 0;
}

int cmd_hotspots(const RunConfig& rc, const fs::path& out_dir) {
    require_epsilon_window(rc);
    const strips::MetricField metric = strips::solve_jacobi(rc.geometry, rc.n_s, rc.n_t);
    const strips::DiscreteForms forms = strips::assemble_eps(metric);
    const strips::DiscreteForms flat = strips::assemble_flat(metric.grid, rc.geometry.epsilon);
    strips::SolveOptions so;
    so.seed = rc.seed;
    const auto pairs = strips::solve_smallest(forms, rc.N, rc.solver_tol, so);

    bool all_ok = true;
    for (int n = 2; n <= rc.N; ++n) {
        const double delta = rc.delta_override.value_or(0.1 * rc.geometry.L / (n - 1));
        const Eigen::VectorXd psi0 = strips::sample_psi0(n, metric.grid);
        const strips::EigenPair aligned = strips::align_sign(pairs[n - 1], psi0, flat.mass);
        strips::LocationOptions lo;
        lo.flat_top_tol = rc.flat_top_tol;
        lo.grad_tol = rc.grad_tol;
        lo.epsilon = rc.geometry.epsilon;
        const strips::ExtremaReport rep = strips::check_location(aligned, n, delta, metric.grid, lo);
        all_ok = all_ok && rep.all_ok();

        json j;
        j["run_id"] = rc.run_id;
        j["geometry"] = rc.geometry_name;
        j["epsilon"] = rc.geometry.epsilon;
        j["n"] = n;
        j["delta"] = delta;
        j["lambda"] = pairs[n - 1].value;
        j["verdict_max"] = rep.verdict_max;
        j["verdict_min"] = rep.verdict_min;
        j["boundary_verdict"] = rep.boundary_verdict;
        j["interior_parity_ok"] = rep.interior_parity_ok;
        j["stray_stationary_count"] = rep.stray_stationary.size();
        j["max_nodes"] = node_list(rep.max_nodes);
        j["min_nodes"] = node_list(rep.min_nodes);
        j["stationary_nodes"] = node_list(rep.stationary_nodes);
        std::ofstream(out_dir / ("hotspots_n" + std::to_string(n) + ".json")) << j.dump(2) << "\n";
    }
    dump_metric(metric, out_dir / "metric.txt");
    std::cout << (all_ok ? "all verdicts hold\n" : "at least one verdict failed\n");
    return all_ok ? 0 : 1;
}

int cmd_sweep(const RunConfig& rc, const fs::path& out_dir) {
    require_epsilon_window(rc);
    if (rc.eps_list.size() < 4)
        throw strips::ConfigError("sweep needs an 'eps_list' with at least 4 entries");

    strips::SweepOptions so;
    so.n_t = rc.n_t;
    so.solver_tol = rc.solver_tol;
    so.seed = rc.seed;

    bool ok = true;
    for (const std::string& obs : rc.observables) {
        const strips::ConvergenceReport rep =
            strips::sweep_convergence(rc.geometry, rc.eps_list, rc.N, obs, so);

        std::ofstream csv(out_dir / ("sweep_" + obs + ".csv"));
        csv << "epsilon,error,n_s\n";
        for (const auto& p : rep.points)
            csv << fmt17(p.epsilon) << ',' << fmt17(p.error) << ',' << p.n_s << "\n";

        json j;
        j["run_id"] = rc.run_id;
        j["geometry"] = rc.geometry_name;
        j["observable"] = obs;
        j["n"] = rc.N;
        j["slope"] = rep.exact_fit_skipped ? json("exact, fit skipped") : json(rep.slope);
        j["intercept"] = rep.intercept;
        j["fit_residual"] = rep.fit_residual;
        j["floor_warning"] = rep.floor_warning;
        j["skipped_eps"] = rep.skipped_eps;
        json pts = json::array();
        for (const auto& p : rep.points)
            pts.push_back({{"epsilon", p.epsilon}, {"error", p.error}, {"n_s", p.n_s}});
        j["points"] = pts;
        std::ofstream(out_dir / ("sweep_" + obs + ".json")) << j.dump(2) << "\n";
        std::cout << obs << ": "
                  << (rep.exact_fit_skipped ? std::string("exact, fit skipped")
                                            : "slope " + fmt17(rep.slope))
                  << "\n";
        ok = ok && rep.skipped_eps.empty();
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"thin-strip Neumann spectral laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    unsigned seed = 42;
    bool seed_given = false;

    for (const char* name : {"validate", "spectrum", "hotspots", "sweep"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config path")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "RNG seed override")->each([&](const std::string&) {
            seed_given = true;
        });
    }

    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        const RunConfig rc = load_config(config_path, seed, seed_given);
        fs::create_directories(out_dir);
        if (sub == "validate")
            return cmd_validate(rc, out_dir);
        if (sub == "spectrum")
            return cmd_spectrum(rc, out_dir);
        if (sub == "hotspots")
            return cmd_hotspots(rc, out_dir);
        return cmd_sweep(rc, out_dir);
    } catch (const strips::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const strips::PreconditionViolated& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
