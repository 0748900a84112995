#pragma once

#include "strips/forms.hpp"
#include "strips/geometry.hpp"
#include "strips/solver.hpp"

#include <string>
#include <utility>
#include <vector>

namespace strips {

struct StationaryPoint {
    double s;
    int m;
    bool is_max; // even m under the reference sign convention
};

// s_m = m L / (n-1), m = 0..n-1; even m tagged max, odd m tagged min.
std::vector<StationaryPoint> stationary_points_1d(int n, double L);

struct NodeRef {
    int i;
    int j;
};

// Grid nodes within flat_top_tol * (max - min) of the global max / min.
// Throws DegenerateRange when the range is below 1e-12.
std::pair<std::vector<NodeRef>, std::vector<NodeRef>>
locate_extrema(const Eigen::VectorXd& v, const GridSpec& grid, double flat_top_tol = 1e-6);

struct ExtremaReport {
    int n = 2;
    double epsilon = 0.0;
    double delta = 0.0;
    std::vector<NodeRef> max_nodes;
    std::vector<NodeRef> min_nodes;
    std::vector<NodeRef> stationary_nodes;   // interior nodes with small gradient
    std::vector<NodeRef> stray_stationary;   // stationary nodes outside every band
    bool verdict_max = false;   // max nodes inside union of even-m localization sets
    bool verdict_min = false;   // min nodes inside union of odd-m localization sets
    bool boundary_verdict = false; // all extrema on boundary nodes (hot spots, n = 2)
    bool interior_parity_ok = false; // no forbidden-parity local extremum in interior bands

    bool all_ok() const {
        return verdict_max && verdict_min && interior_parity_ok && stray_stationary.empty();
    }
};

struct LocationOptions {
    double flat_top_tol = 1e-6;
    double grad_tol = 1e-3; // stationary threshold relative to the max gradient
    double epsilon = 0.0;   // recorded in the report
};

// Containment checks of the localization theorem: global extrema inside the
// parity-matching bands around s_m, no stationary interior node outside all
// bands, no local extremum of the forbidden parity inside interior bands.
// The vector must be sign-aligned to psi_n^0.
ExtremaReport check_location(const EigenPair& pair, int n, double delta, const GridSpec& grid,
                             const LocationOptions& opts = {});

struct ConvergencePoint {
    double epsilon;
    double error;
    int n_s;
};

struct ConvergenceReport {
    std::string observable;
    std::vector<ConvergencePoint> points;
    double slope = 0.0;
    double intercept = 0.0;
    double fit_residual = 0.0;
    bool exact_fit_skipped = false; // all errors numerically zero
    bool floor_warning = false;     // stagnation across the two smallest eps
    std::vector<double> skipped_eps; // degeneracy aborted the mode pairing
};

// Least-squares fit of log(error) against log(eps).
struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
};
RateFit fit_loglog(const std::vector<std::pair<double, double>>& points);

struct SweepOptions {
    int base_ns = 64;
    int max_ns = 1537;
    int n_t = 9;
    double solver_tol = 1e-10;
    double resolvent_tol = 1e-8;
    unsigned seed = 42;
    // "discrete": reference eigenpair of the flat problem on the matched grid
    // (cancels the O(h^2) floor); "analytic": closed-form lambda_n^0 / psi_n^0.
    std::string reference = "discrete";
};

// Observables: eigenvalue_error, l2_error, sup_error, sup_grad_s_error,
// resolvent_gap. eps_list must be geometric with ratio <= 1/sqrt(2), length
// >= 4, every entry below min(epsilon_tilde, L/(2(n-1))).
ConvergenceReport sweep_convergence(const StripGeometry& shape, const std::vector<double>& eps_list,
                                    int n, const std::string& observable,
                                    const SweepOptions& opts = {});

} // namespace strips
