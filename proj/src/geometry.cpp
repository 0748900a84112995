#include "strips/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace strips {

namespace {

double checked(double v, const char* what) {
    if (!std::isfinite(v))
        throw EvaluationFailure(std::string(what) + " produced a non-finite value");
    return v;
}

} // namespace

double StripGeometry::gauss_at(double s, double u) const {
    if (constant_gauss)
        return gauss_value;
    if (!gauss)
        throw EvaluationFailure("Gauss curvature callback is empty");
    try {
        return checked(gauss(s, u), "Gauss curvature");
    } catch (const EvaluationFailure&) {
        throw;
    } catch (const std::exception& e) {
        throw EvaluationFailure(std::string("Gauss curvature callback threw: ") + e.what());
    }
}

double StripGeometry::kappa_at(double s) const {
    if (!kappa)
        throw EvaluationFailure("curvature callback is empty");
    try {
        return checked(kappa(s), "curvature");
    } catch (const EvaluationFailure&) {
        throw;
    } catch (const std::exception& e) {
        throw EvaluationFailure(std::string("curvature callback threw: ") + e.what());
    }
}

double StripGeometry::kappa_sup(int samples) const {
    double m = 0.0;
    for (int i = 0; i < samples; ++i) {
        double s = L * i / (samples - 1);
        m = std::max(m, std::abs(kappa_at(s)));
    }
    return m;
}

double StripGeometry::gauss_sup(int s_samples, int u_samples) const {
    if (constant_gauss)
        return std::abs(gauss_value);
    double m = 0.0;
    for (int i = 0; i < s_samples; ++i) {
        double s = L * i / (s_samples - 1);
        for (int j = 0; j < u_samples; ++j) {
            double u = -epsilon + 2.0 * epsilon * j / (u_samples - 1);
            m = std::max(m, std::abs(gauss_at(s, u)));
        }
    }
    return m;
}

double MetricField::min_f() const {
    return *std::min_element(f.begin(), f.end());
}

double MetricField::max_f() const {
    return *std::max_element(f.begin(), f.end());
}

MetricField solve_jacobi(const StripGeometry& geom, int n_s, int n_t) {
    if (geom.L <= 0.0 || geom.epsilon <= 0.0)
        throw PreconditionViolated("solve_jacobi: L and epsilon must be positive");
    if (n_s < 2)
        throw PreconditionViolated("solve_jacobi: n_s must be at least 2");
    if (n_t < 3 || n_t % 2 == 0)
        throw PreconditionViolated("solve_jacobi: n_t must be odd and at least 3");

    MetricField m;
    m.grid = GridSpec{geom.L, n_s, n_t};
    m.epsilon = geom.epsilon;
    m.f.assign(m.grid.size(), 0.0);
    m.df_dt.assign(m.grid.size(), 0.0);
    m.d2f_dt2.assign(m.grid.size(), 0.0);
    m.df_ds.assign(m.grid.size(), 0.0);

    const double eps = geom.epsilon;
    const double eps2 = eps * eps;
    const double ht = m.grid.h_t();
    const int j0 = (n_t - 1) / 2; // t = 0 node
    const int substeps = 4;       // RK4 steps per grid interval

    for (int i = 0; i < n_s; ++i) {
        const double s = m.grid.s(i);
        const double kap = geom.kappa_at(s);

        auto coeff = [&](double t) { return eps2 * geom.gauss_at(s, eps * t); };

        // record at t = 0
        m.f[m.grid.index(i, j0)] = 1.0;
        m.df_dt[m.grid.index(i, j0)] = -eps * kap;
        m.d2f_dt2[m.grid.index(i, j0)] = -coeff(0.0) * 1.0;

        for (int dir : {+1, -1}) {
            double fv = 1.0;
            double gv = -eps * kap;
            double t = 0.0;
            const double h = dir * ht / substeps;
            for (int j = j0 + dir; j >= 0 && j < n_t; j += dir) {
                for (int k = 0; k < substeps; ++k) {
                    // classical RK4 for (f, g)' = (g, -eps^2 K f)
                    const double k1f = gv;
                    const double k1g = -coeff(t) * fv;
                    const double k2f = gv + 0.5 * h * k1g;
                    const double k2g = -coeff(t + 0.5 * h) * (fv + 0.5 * h * k1f);
                    const double k3f = gv + 0.5 * h * k2g;
                    const double k3g = -coeff(t + 0.5 * h) * (fv + 0.5 * h * k2f);
                    const double k4f = gv + h * k3g;
                    const double k4g = -coeff(t + h) * (fv + h * k3f);
                    fv += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
                    gv += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
                    t += h;
                }
                const int idx = m.grid.index(i, j);
                m.f[idx] = fv;
                m.df_dt[idx] = gv;
                m.d2f_dt2[idx] = -coeff(m.grid.t(j)) * fv;
            }
        }
    }

    if (m.min_f() <= 0.0)
        throw NonPositiveJacobian("solve_jacobi: f reached zero; strip is not a "
                                  "local diffeomorphism at this epsilon");

    // df/ds by 4th-order central differences, one-sided at the ends.
    const double hs = m.grid.h_s();
    for (int j = 0; j < n_t; ++j) {
        auto F = [&](int i) { return m.f[m.grid.index(i, j)]; };
        auto D = [&](int i) -> double& { return m.df_ds[m.grid.index(i, j)]; };
        if (n_s >= 5) {
            for (int i = 2; i <= n_s - 3; ++i)
                D(i) = (F(i - 2) - 8.0 * F(i - 1) + 8.0 * F(i + 1) - F(i + 2)) / (12.0 * hs);
            D(0) = (-25.0 * F(0) + 48.0 * F(1) - 36.0 * F(2) + 16.0 * F(3) - 3.0 * F(4)) / (12.0 * hs);
            D(1) = (-3.0 * F(0) - 10.0 * F(1) + 18.0 * F(2) - 6.0 * F(3) + F(4)) / (12.0 * hs);
            const int e = n_s - 1;
            D(e) = (25.0 * F(e) - 48.0 * F(e - 1) + 36.0 * F(e - 2) - 16.0 * F(e - 3) + 3.0 * F(e - 4)) / (12.0 * hs);
            D(e - 1) = (3.0 * F(e) + 10.0 * F(e - 1) - 18.0 * F(e - 2) + 6.0 * F(e - 3) - F(e - 4)) / (12.0 * hs);
        } else {
            // too few columns for 4th order; fall back to low order
            for (int i = 0; i < n_s; ++i) {
                const int a = std::max(0, i - 1);
                const int b = std::min(n_s - 1, i + 1);
                D(i) = (F(b) - F(a)) / ((b - a) * hs);
            }
        }
    }

    return m;
}

double c_epsilon(const StripGeometry& geom) {
    const double kn = geom.kappa_sup();
    const double Kn = geom.gauss_sup();
    const double eps = geom.epsilon;
    const double half = 0.5 * eps * eps * Kn;
    if (half >= 1.0)
        throw PreconditionViolated("c_epsilon: eps^2 |K| must be below 2");
    return eps * kn + half * (1.0 + eps * kn) / (1.0 - half);
}

double epsilon_tilde(const StripGeometry& geom) {
    const double kn = geom.kappa_sup();
    const double Kn = geom.gauss_sup();
    if (kn == 0.0 && Kn == 0.0)
        return std::numeric_limits<double>::infinity();

    auto c_at = [&](double eps) {
        const double half = 0.5 * eps * eps * Kn;
        return eps * kn + half * (1.0 + eps * kn) / (1.0 - half);
    };

    double hi;
    if (Kn > 0.0) {
        hi = std::sqrt(2.0 / Kn) * (1.0 - 1e-12);
    } else {
        hi = 1.0 / kn;
        while (c_at(hi) < 1.0)
            hi *= 2.0;
    }
    double lo = 0.0;
    // C is increasing and maps (0, hi) onto (0, +inf); bisect C = 1
    while ((hi - lo) > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        (c_at(mid) < 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ValidityReport validate_geometry(const StripGeometry& geom, int n_s, int n_t) {
    ValidityReport r;
    r.eps_tilde = epsilon_tilde(geom);
    const double Kn = geom.gauss_sup();
    const bool below_bound = Kn == 0.0 || geom.epsilon < std::sqrt(2.0 / Kn);
    r.c_eps = below_bound ? c_epsilon(geom) : std::numeric_limits<double>::infinity();
    bool positive = false;
    try {
        const MetricField m = solve_jacobi(geom, n_s, n_t);
        positive = m.min_f() > 0.0;
    } catch (const NonPositiveJacobian&) {
        positive = false;
    }
    r.valid = positive && geom.epsilon < r.eps_tilde;
    return r;
}

AsymptoticsTable verify_f_asymptotics(const std::vector<MetricField>& family) {
    if (family.size() < 4)
        throw InsufficientData("verify_f_asymptotics: need at least 4 epsilon values");

    AsymptoticsTable table;
    for (const MetricField& m : family) {
        AsymptoticsRow row{m.epsilon, 0.0, 0.0, 0.0, 0.0};
        for (int idx = 0; idx < m.grid.size(); ++idx) {
            row.sup_f_minus_1 = std::max(row.sup_f_minus_1, std::abs(m.f[idx] - 1.0));
            row.sup_df_ds = std::max(row.sup_df_ds, std::abs(m.df_ds[idx]));
            row.sup_df_dt = std::max(row.sup_df_dt, std::abs(m.df_dt[idx]));
            row.sup_d2f_dt2 = std::max(row.sup_d2f_dt2, std::abs(m.d2f_dt2[idx]));
        }
        table.rows.push_back(row);
    }

    auto fit = [&](auto field) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int k = 0;
        for (const AsymptoticsRow& r : table.rows) {
            const double e = r.*field;
            if (e <= 0.0)
                continue;
            const double x = std::log(r.epsilon);
            const double y = std::log(e);
            sx += x; sy += y; sxx += x * x; sxy += x * y; ++k;
        }
        if (k < 2)
            return std::numeric_limits<double>::quiet_NaN();
        return (k * sxy - sx * sy) / (k * sxx - sx * sx);
    };

    double total = 0.0;
    for (const AsymptoticsRow& r : table.rows)
        total += r.sup_f_minus_1 + r.sup_df_ds + r.sup_df_dt + r.sup_d2f_dt2;
    table.degenerate = total == 0.0;
    if (!table.degenerate) {
        table.slope_f_minus_1 = fit(&AsymptoticsRow::sup_f_minus_1);
        table.slope_df_ds = fit(&AsymptoticsRow::sup_df_ds);
        table.slope_df_dt = fit(&AsymptoticsRow::sup_df_dt);
        table.slope_d2f_dt2 = fit(&AsymptoticsRow::sup_d2f_dt2);
    }
    return table;
}

double uniform_class_bound(const StripGeometry& geom, int samples) {
    const double h = geom.L / (samples - 1) / 8.0; // FD step well inside the grid
    auto kap = [&](double s) { return geom.kappa_at(std::clamp(s, 0.0, geom.L)); };

    double sup = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double s = geom.L * i / (samples - 1);
        const double sc = std::clamp(s, 2.0 * h, geom.L - 2.0 * h);
        const double k0 = std::abs(kap(s));
        const double k1 = std::abs((kap(sc + h) - kap(sc - h)) / (2.0 * h));
        const double k2 = std::abs((kap(sc + h) - 2.0 * kap(sc) + kap(sc - h)) / (h * h));
        const double k3 = std::abs((kap(sc + 2 * h) - 2.0 * kap(sc + h) + 2.0 * kap(sc - h) - kap(sc - 2 * h)) / (2.0 * h * h * h));

        double kpart = k0 + k1 + k2 + k3;
        double Kpart = 0.0;
        const int u_samples = 17;
        for (int j = 0; j < u_samples; ++j) {
            const double u = -geom.epsilon + 2.0 * geom.epsilon * j / (u_samples - 1);
            auto Ks = [&](double x) { return geom.gauss_at(std::clamp(x, 0.0, geom.L), u); };
            const double g0 = std::abs(Ks(s));
            const double g1 = std::abs((Ks(sc + h) - Ks(sc - h)) / (2.0 * h));
            const double g2 = std::abs((Ks(sc + h) - 2.0 * Ks(sc) + Ks(sc - h)) / (h * h));
            const double g3 = std::abs((Ks(sc + 2 * h) - 2.0 * Ks(sc + h) + 2.0 * Ks(sc - h) - Ks(sc - 2 * h)) / (2.0 * h * h * h));
            const double hu = std::max(geom.epsilon / 8.0, 1e-6);
            const double gu = std::abs((geom.gauss_at(std::clamp(s, 0.0, geom.L), u + hu) -
                                        geom.gauss_at(std::clamp(s, 0.0, geom.L), u - hu)) / (2.0 * hu));
            Kpart = std::max(Kpart, g0 + g1 + g2 + g3 + gu);
        }
        sup = std::max(sup, kpart + Kpart);
    }
    return sup;
}

} // namespace strips
