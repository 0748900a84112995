#include "strips/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace strips {

std::vector<StationaryPoint> stationary_points_1d(int n, double L) {
    if (n < 2)
        throw PreconditionViolated("stationary_points_1d: mode index must be at least 2");
    if (L <= 0.0)
        throw PreconditionViolated("stationary_points_1d: L must be positive");
    std::vector<StationaryPoint> pts;
    for (int m = 0; m <= n - 1; ++m)
        pts.push_back({m * L / (n - 1), m, m % 2 == 0});
    return pts;
}

std::pair<std::vector<NodeRef>, std::vector<NodeRef>>
locate_extrema(const Eigen::VectorXd& v, const GridSpec& grid, double flat_top_tol) {
    const double vmax = v.maxCoeff();
    const double vmin = v.minCoeff();
    const double range = vmax - vmin;
    if (range < 1e-12)
        throw DegenerateRange("locate_extrema: grid function is numerically constant");

    std::vector<NodeRef> maxs, mins;
    const double tol = flat_top_tol * range;
    for (int j = 0; j < grid.n_t; ++j)
        for (int i = 0; i < grid.n_s; ++i) {
            const double x = v[grid.index(i, j)];
            if (vmax - x <= tol)
                maxs.push_back({i, j});
            if (x - vmin <= tol)
                mins.push_back({i, j});
        }
    return {maxs, mins};
}

namespace {

// membership in the closed localization set for index m: the side columns
// for m = 0 and m = n-1, a closed band |s - s_m| <= delta otherwise
bool in_tilde_set(int i, int m, int n, double delta, const GridSpec& grid) {
    if (m == 0)
        return i == 0;
    if (m == n - 1)
        return i == grid.n_s - 1;
    const double sm = m * grid.L / (n - 1);
    return std::abs(grid.s(i) - sm) <= delta + 1e-14;
}

// open band S_m(delta) intersected with (0, L)
bool in_open_band(double s, int m, int n, double delta, const GridSpec& grid) {
    const double sm = m * grid.L / (n - 1);
    return std::abs(s - sm) < delta && s > 0.0 && s < grid.L;
}

} // namespace

ExtremaReport check_location(const EigenPair& pair, int n, double delta, const GridSpec& grid,
                             const LocationOptions& opts) {
    if (n < 2)
        throw PreconditionViolated("check_location: mode index must be at least 2");
    if (!(delta > 0.0 && delta < grid.L / (4.0 * (n - 1))))
        throw PreconditionViolated("check_location: delta must lie in (0, L/(4(N-1)))");
    if (pair.vector.size() != grid.size())
        throw PreconditionViolated("check_location: vector does not match the grid");

    ExtremaReport rep;
    rep.n = n;
    rep.delta = delta;
    rep.epsilon = opts.epsilon;

    auto [maxs, mins] = locate_extrema(pair.vector, grid, opts.flat_top_tol);
    rep.max_nodes = std::move(maxs);
    rep.min_nodes = std::move(mins);

    auto contained = [&](const std::vector<NodeRef>& nodes, int parity) {
        for (const NodeRef& nd : nodes) {
            bool inside = false;
            for (int m = parity; m <= n - 1 && !inside; m += 2)
                inside = in_tilde_set(nd.i, m, n, delta, grid);
            if (!inside)
                return false;
        }
        return true;
    };
    rep.verdict_max = contained(rep.max_nodes, 0);
    rep.verdict_min = contained(rep.min_nodes, 1);

    auto on_boundary = [&](const NodeRef& nd) {
        return nd.i == 0 || nd.i == grid.n_s - 1 || nd.j == 0 || nd.j == grid.n_t - 1;
    };
    rep.boundary_verdict = std::all_of(rep.max_nodes.begin(), rep.max_nodes.end(), on_boundary) &&
                           std::all_of(rep.min_nodes.begin(), rep.min_nodes.end(), on_boundary);

    // discrete gradient at interior nodes, central differences
    const auto& v = pair.vector;
    const double hs = grid.h_s();
    const double ht = grid.h_t();
    std::vector<double> gradmag(grid.size(), 0.0);
    double max_grad = 0.0;
    for (int j = 1; j < grid.n_t - 1; ++j)
        for (int i = 1; i < grid.n_s - 1; ++i) {
            const double gs = (v[grid.index(i + 1, j)] - v[grid.index(i - 1, j)]) / (2.0 * hs);
            const double gt = (v[grid.index(i, j + 1)] - v[grid.index(i, j - 1)]) / (2.0 * ht);
            const double g = std::hypot(gs, gt);
            gradmag[grid.index(i, j)] = g;
            max_grad = std::max(max_grad, g);
        }
    const double threshold = opts.grad_tol * max_grad;
    for (int j = 1; j < grid.n_t - 1; ++j)
        for (int i = 1; i < grid.n_s - 1; ++i)
            if (gradmag[grid.index(i, j)] <= threshold) {
                rep.stationary_nodes.push_back({i, j});
                bool inside = false;
                for (int m = 0; m <= n - 1 && !inside; ++m)
                    inside = in_open_band(grid.s(i), m, n, delta, grid);
                if (!inside)
                    rep.stray_stationary.push_back({i, j});
            }

    // forbidden-parity local extrema inside the interior bands; a local
    // extremum must strictly beat every available neighbour, ties count as
    // no extremum
    rep.interior_parity_ok = true;
    for (int m = 1; m <= n - 2; ++m) {
        for (int j = 0; j < grid.n_t; ++j)
            for (int i = 1; i < grid.n_s - 1; ++i) {
                if (!in_open_band(grid.s(i), m, n, delta, grid))
                    continue;
                const double x = v[grid.index(i, j)];
                bool strict_max = true, strict_min = true;
                for (int dj = -1; dj <= 1; ++dj)
                    for (int di = -1; di <= 1; ++di) {
                        if (di == 0 && dj == 0)
                            continue;
                        const int ii = i + di, jj = j + dj;
                        if (ii < 0 || ii >= grid.n_s || jj < 0 || jj >= grid.n_t)
                            continue;
                        const double y = v[grid.index(ii, jj)];
                        strict_max = strict_max && x > y;
                        strict_min = strict_min && x < y;
                    }
                if ((m % 2 == 0 && strict_min) || (m % 2 == 1 && strict_max))
                    rep.interior_parity_ok = false;
            }
    }
    return rep;
}

RateFit fit_loglog(const std::vector<std::pair<double, double>>& points) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int k = static_cast<int>(points.size());
    if (k < 2)
        throw InsufficientData("fit_loglog: need at least 2 points");
    for (const auto& [eps, err] : points) {
        if (eps <= 0.0 || err <= 0.0)
            throw PreconditionViolated("fit_loglog: points must be positive");
        sx += std::log(eps);
        sy += std::log(err);
        sxx += std::log(eps) * std::log(eps);
        sxy += std::log(eps) * std::log(err);
    }
    RateFit fit;
    fit.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / k;
    for (const auto& [eps, err] : points) {
        const double r = std::log(err) - (fit.intercept + fit.slope * std::log(eps));
        fit.residual += r * r;
    }
    fit.residual = std::sqrt(fit.residual / k);
    return fit;
}

namespace {

double grad_s_sup(const Eigen::VectorXd& v, const GridSpec& grid) {
    const double hs = grid.h_s();
    double sup = 0.0;
    for (int j = 0; j < grid.n_t; ++j)
        for (int i = 0; i < grid.n_s; ++i) {
            double g;
            if (i == 0)
                g = (v[grid.index(1, j)] - v[grid.index(0, j)]) / hs;
            else if (i == grid.n_s - 1)
                g = (v[grid.index(i, j)] - v[grid.index(i - 1, j)]) / hs;
            else
                g = (v[grid.index(i + 1, j)] - v[grid.index(i - 1, j)]) / (2.0 * hs);
            sup = std::max(sup, std::abs(g));
        }
    return sup;
}

} // namespace

ConvergenceReport sweep_convergence(const StripGeometry& shape, const std::vector<double>& eps_list,
                                    int n, const std::string& observable,
                                    const SweepOptions& opts) {
    if (eps_list.size() < 4)
        throw PreconditionViolated("sweep_convergence: need at least 4 epsilon values");
    std::vector<double> eps(eps_list);
    std::sort(eps.begin(), eps.end(), std::greater<>());
    const double ratio = eps[1] / eps[0];
    if (ratio > 1.0 / std::sqrt(2.0) + 1e-12)
        throw PreconditionViolated("sweep_convergence: eps_list ratio must be <= 1/sqrt(2)");
    for (size_t k = 1; k + 1 < eps.size(); ++k)
        if (std::abs(eps[k + 1] / eps[k] - ratio) > 1e-6 * ratio)
            throw PreconditionViolated("sweep_convergence: eps_list must be geometric");
    const double tilde = epsilon_tilde(shape);
    const double rearrange = shape.L / (2.0 * (n - 1));
    for (double e : eps)
        if (!(e < tilde && e < rearrange))
            throw PreconditionViolated(
                "sweep_convergence: every eps must satisfy eps < L/(2(N-1)) and eps < epsilon_tilde");

    const bool known[] = {observable == "eigenvalue_error", observable == "l2_error",
                          observable == "sup_error", observable == "sup_grad_s_error",
                          observable == "resolvent_gap"};
    if (!std::any_of(std::begin(known), std::end(known), [](bool b) { return b; }))
        throw PreconditionViolated("sweep_convergence: unknown observable " + observable);

    ConvergenceReport rep;
    rep.observable = observable;

    struct PipelineOut {
        double error;
        bool degenerate;
    };

    auto pipeline = [&](double e, int n_s) -> PipelineOut {
        const StripGeometry geom = shape.with_epsilon(e);
        const MetricField metric = solve_jacobi(geom, n_s, opts.n_t);
        const DiscreteForms forms_eps = assemble_eps(metric);
        const DiscreteForms forms_flat = assemble_flat(metric.grid, e);

        if (observable == "resolvent_gap") {
            const ResolventEstimate est =
                resolvent_gap(forms_eps, forms_flat, metric, opts.resolvent_tol, opts.seed);
            return {est.norm_estimate, false};
        }

        SolveOptions so;
        so.seed = opts.seed;
        const auto pairs = solve_smallest(forms_eps, n, opts.solver_tol, so);
        if (pairs[n - 1].degenerate)
            return {0.0, true};

        const Eigen::VectorXd psi0 = sample_psi0(n, metric.grid);
        const double lambda0_analytic = std::pow((n - 1) * M_PI / shape.L, 2);

        double lambda_ref;
        Eigen::VectorXd vec_ref;
        if (opts.reference == "analytic") {
            lambda_ref = lambda0_analytic;
            vec_ref = psi0;
        } else {
            const auto flat_pairs = solve_smallest(forms_flat, n, opts.solver_tol, so);
            if (flat_pairs[n - 1].degenerate)
                return {0.0, true};
            lambda_ref = flat_pairs[n - 1].value;
            const EigenPair r = align_sign(flat_pairs[n - 1], psi0, forms_flat.mass);
            vec_ref = r.vector;
        }

        if (observable == "eigenvalue_error")
            return {std::abs(pairs[n - 1].value - lambda_ref), false};

        const EigenPair aligned = align_sign(pairs[n - 1], vec_ref, forms_flat.mass);
        const Eigen::VectorXd diff = aligned.vector - vec_ref;
        if (observable == "l2_error")
            return {std::sqrt(diff.dot(forms_flat.mass * diff)), false};
        if (observable == "sup_error")
            return {diff.cwiseAbs().maxCoeff(), false};
        return {grad_s_sup(diff, metric.grid), false}; // sup_grad_s_error
    };

    // bootstrap the grid-scaling rule from the coarsest run
    const PipelineOut coarse = pipeline(eps[0], opts.base_ns);
    double c_est = coarse.degenerate ? 0.0 : coarse.error / eps[0];

    for (double e : eps) {
        int n_s = opts.base_ns;
        if (c_est > 0.0) {
            const double target = 0.1 * c_est * e; // keep h^2 below 10% of the signal
            n_s = std::max(n_s, static_cast<int>(std::ceil(shape.L / std::sqrt(target))) + 1);
            n_s = std::min(n_s, opts.max_ns);
        }
        try {
            const PipelineOut out = pipeline(e, n_s);
            if (out.degenerate) {
                rep.skipped_eps.push_back(e);
                continue;
            }
            rep.points.push_back({e, out.error, n_s});
        } catch (const DegenerateAlignment&) {
            rep.skipped_eps.push_back(e);
        }
    }

    std::vector<std::pair<double, double>> fit_pts;
    for (const ConvergencePoint& p : rep.points)
        if (p.error > 1e-13)
            fit_pts.emplace_back(p.epsilon, p.error);

    if (fit_pts.empty()) {
        rep.exact_fit_skipped = true;
        rep.slope = std::numeric_limits<double>::quiet_NaN();
        return rep;
    }
    if (rep.points.size() >= 2) {
        const auto& a = rep.points[rep.points.size() - 2];
        const auto& b = rep.points.back();
        if (a.error > 0.0 && std::abs(b.error - a.error) < 0.05 * a.error)
            rep.floor_warning = true; // h-refinement needed
    }
    if (fit_pts.size() >= 2) {
        const RateFit fit = fit_loglog(fit_pts);
        rep.slope = fit.slope;
        rep.intercept = fit.intercept;
        rep.fit_residual = fit.residual;
    } else {
        rep.slope = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

} // namespace strips
