#pragma once

#include "strips/errors.hpp"
#include "strips/grid.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace strips {

using CurveFn = std::function<double(double)>;           // s -> value
using SurfaceFn = std::function<double(double, double)>; // (s, u) -> value, u = unscaled normal distance

// Intrinsic data of a strip of half-width epsilon around a curve of length L:
// geodesic curvature kappa(s) and the Gauss curvature K(s, u) of the ambient
// surface. A constant-K shortcut skips callback evaluation.
struct StripGeometry {
    double L = 1.0;
    CurveFn kappa;
    SurfaceFn gauss;
    bool constant_gauss = false;
    double gauss_value = 0.0;
    double epsilon = 0.1;

    StripGeometry with_epsilon(double eps) const {
        StripGeometry g = *this;
        g.epsilon = eps;
        return g;
    }

    double gauss_at(double s, double u) const;
    double kappa_at(double s) const;

    // Grid maxima standing in for the true suprema. kappa over [0,L],
    // K over [0,L] x [-epsilon, epsilon], on 4096 intervals so the sample
    // set refines every solve grid with a power-of-two interval count.
    double kappa_sup(int samples = 4097) const;
    double gauss_sup(int s_samples = 4097, int u_samples = 33) const;
};

// Samples of the Jacobi-equation solution f(s, t) and its partials on the
// reference rectangle. f > 0 at every node and f(., 0) = 1 by construction.
struct MetricField {
    GridSpec grid;
    double epsilon = 0.0;
    std::vector<double> f;       // node samples, t-major (grid.index)
    std::vector<double> df_ds;   // 4th-order finite differences in s
    std::vector<double> df_dt;   // integrator state, exact at nodes
    std::vector<double> d2f_dt2; // ODE right-hand side at nodes

    double at(int i, int j) const { return f[grid.index(i, j)]; }
    double min_f() const;
    double max_f() const;
};

struct ValidityReport {
    double c_eps = 0.0;
    double eps_tilde = std::numeric_limits<double>::infinity();
    bool valid = false;
};

// Integrates d^2f/dt^2 + eps^2 K(s, eps t) f = 0 with f(s,0) = 1,
// df/dt(s,0) = -eps kappa(s), column by column, with a fixed-step classical
// RK4 scheme (4 substeps per t-grid interval, symmetric from t = 0).
// Throws NonPositiveJacobian if any sample drops to zero or below.
MetricField solve_jacobi(const StripGeometry& geom, int n_s, int n_t);

// C_eps = eps|kappa| + (1/2) eps^2 |K| (1 + eps|kappa|) / (1 - (1/2) eps^2 |K|),
// with grid-max norms. Requires eps^2 |K| / 2 < 1.
double c_epsilon(const StripGeometry& geom);

// Unique root of C_eps = 1 on (0, sqrt(2/|K|)), bisected to relative
// tolerance 1e-10. Returns +inf when kappa and K both vanish.
double epsilon_tilde(const StripGeometry& geom);

ValidityReport validate_geometry(const StripGeometry& geom, int n_s = 129, int n_t = 9);

struct AsymptoticsRow {
    double epsilon;
    double sup_f_minus_1;
    double sup_df_ds;
    double sup_df_dt;
    double sup_d2f_dt2;
};

// Sup-norm decay rates of f-1, df/ds, df/dt, d^2f/dt^2 across a family of
// metric fields at geometrically decreasing epsilon. Expected orders are
// 1, 1, 1, 2. `degenerate` marks the all-zero (flat) family where no fit
// is possible.
struct AsymptoticsTable {
    std::vector<AsymptoticsRow> rows;
    double slope_f_minus_1 = 0.0;
    double slope_df_ds = 0.0;
    double slope_df_dt = 0.0;
    double slope_d2f_dt2 = 0.0;
    bool degenerate = false;
};

AsymptoticsTable verify_f_asymptotics(const std::vector<MetricField>& family);

// Left-hand side of the uniform-class bound: grid supremum of
// sum_{i<=3} (|kappa^(i)| + |d^i_s K|) + |d_u K|, derivatives by finite
// differences on an oversampled grid. Diagnostic only.
double uniform_class_bound(const StripGeometry& geom, int samples = 2048);

} // namespace strips
