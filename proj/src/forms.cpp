#include "strips/forms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace strips {

namespace {

struct NodeValues {
    const GridSpec* grid;
    const std::vector<double>* f; // null means f = 1
    double at(int i, int j) const { return f ? (*f)[grid->index(i, j)] : 1.0; }
};

DiscreteForms assemble(const GridSpec& grid, double epsilon, const NodeValues& fval) {
    grid.require_assembly_grade();
    if (epsilon <= 0.0)
        throw PreconditionViolated("assemble: epsilon must be positive");

    const double hs = grid.h_s();
    const double ht = grid.h_t();
    const double jac = hs * ht / 4.0; // reference square [-1,1]^2
    const double inv_eps2 = 1.0 / (epsilon * epsilon);
    const double gp = 1.0 / std::sqrt(3.0);

    // bilinear basis on the reference square, local node order
    // (0,0), (1,0), (0,1), (1,1) in (i, j) offsets
    auto shape = [](int a, double xi, double eta) {
        const double sx = (a == 0 || a == 2) ? -1.0 : 1.0;
        const double se = (a == 0 || a == 1) ? -1.0 : 1.0;
        return 0.25 * (1.0 + sx * xi) * (1.0 + se * eta);
    };
    auto dshape_xi = [](int a, double eta) {
        const double sx = (a == 0 || a == 2) ? -1.0 : 1.0;
        const double se = (a == 0 || a == 1) ? -1.0 : 1.0;
        return 0.25 * sx * (1.0 + se * eta);
    };
    auto dshape_eta = [](int a, double xi) {
        const double sx = (a == 0 || a == 2) ? -1.0 : 1.0;
        const double se = (a == 0 || a == 1) ? -1.0 : 1.0;
        return 0.25 * se * (1.0 + sx * xi);
    };

    std::vector<Eigen::Triplet<double>> ta, tm;
    ta.reserve(static_cast<size_t>(grid.n_s) * grid.n_t * 16);
    tm.reserve(static_cast<size_t>(grid.n_s) * grid.n_t * 16);

    const double gauss_pts[2] = {-gp, gp};

    for (int cj = 0; cj < grid.n_t - 1; ++cj) {
        for (int ci = 0; ci < grid.n_s - 1; ++ci) {
            const int nodes[4] = {grid.index(ci, cj), grid.index(ci + 1, cj),
                                  grid.index(ci, cj + 1), grid.index(ci + 1, cj + 1)};
            const double fn[4] = {fval.at(ci, cj), fval.at(ci + 1, cj),
                                  fval.at(ci, cj + 1), fval.at(ci + 1, cj + 1)};

            double Ae[4][4] = {};
            double Me[4][4] = {};

            for (double xi : gauss_pts) {
                for (double eta : gauss_pts) {
                    double fq = 0.0;
                    double phi[4], dphis[4], dphit[4];
                    for (int a = 0; a < 4; ++a) {
                        phi[a] = shape(a, xi, eta);
                        dphis[a] = dshape_xi(a, eta) * 2.0 / hs;
                        dphit[a] = dshape_eta(a, xi) * 2.0 / ht;
                        fq += phi[a] * fn[a];
                    }
                    const double ws = jac / fq;           // f^-1 weight
                    const double wt = jac * inv_eps2 * fq; // eps^-2 f weight
                    const double wm = jac * fq;
                    for (int a = 0; a < 4; ++a)
                        for (int b = 0; b < 4; ++b) {
                            Ae[a][b] += ws * dphis[a] * dphis[b] + wt * dphit[a] * dphit[b];
                            Me[a][b] += wm * phi[a] * phi[b];
                        }
                }
            }

            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    ta.emplace_back(nodes[a], nodes[b], Ae[a][b]);
                    tm.emplace_back(nodes[a], nodes[b], Me[a][b]);
                }
        }
    }

    DiscreteForms forms;
    forms.grid = grid;
    forms.epsilon = epsilon;
    forms.stiffness.resize(grid.size(), grid.size());
    forms.mass.resize(grid.size(), grid.size());
    forms.stiffness.setFromTriplets(ta.begin(), ta.end());
    forms.mass.setFromTriplets(tm.begin(), tm.end());
    forms.stiffness.makeCompressed();
    forms.mass.makeCompressed();
    return forms;
}

} // namespace

DiscreteForms assemble_eps(const MetricField& metric) {
    if (metric.min_f() <= 0.0)
        throw NonPositiveJacobian("assemble_eps: metric has non-positive f samples");
    NodeValues fv{&metric.grid, &metric.f};
    return assemble(metric.grid, metric.epsilon, fv);
}

DiscreteForms assemble_flat(const GridSpec& grid, double epsilon) {
    NodeValues fv{&grid, nullptr};
    return assemble(grid, epsilon, fv);
}

std::vector<ReferenceMode> reference_spectrum(double L, double epsilon, int count) {
    if (count < 1)
        throw PreconditionViolated("reference_spectrum: count must be at least 1");
    if (L <= 0.0 || epsilon <= 0.0)
        throw PreconditionViolated("reference_spectrum: L and epsilon must be positive");

    auto lambda_n = [&](int n) { return std::pow((n - 1) * M_PI / L, 2); };
    auto nu_m = [&](int m) { return std::pow(m * M_PI / (2.0 * epsilon), 2); };

    // candidates with n <= count suffice; m only needs nu_m up to the worst
    // all-longitudinal candidate
    const double bound = lambda_n(count);
    const int m_max = static_cast<int>(std::ceil(2.0 * epsilon * std::sqrt(bound) / M_PI)) + 1;

    std::vector<ReferenceMode> all;
    for (int n = 1; n <= count; ++n)
        for (int m = 0; m <= m_max; ++m)
            all.push_back({lambda_n(n) + nu_m(m), n, m});

    std::sort(all.begin(), all.end(), [](const ReferenceMode& a, const ReferenceMode& b) {
        if (a.lambda != b.lambda)
            return a.lambda < b.lambda;
        if (a.m != b.m)
            return a.m < b.m;
        return a.n < b.n;
    });
    all.resize(count);
    return all;
}

Eigen::VectorXd sample_psi0(int n, const GridSpec& grid) {
    if (n < 1)
        throw PreconditionViolated("sample_psi0: mode index must be at least 1");
    Eigen::VectorXd v(grid.size());
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < grid.n_t; ++j)
        for (int i = 0; i < grid.n_s; ++i) {
            const double s = grid.s(i);
            const double u = (n == 1) ? 1.0 / std::sqrt(grid.L)
                                      : std::sqrt(2.0 / grid.L) * std::cos((n - 1) * M_PI * s / grid.L);
            v[grid.index(i, j)] = u * inv_sqrt2;
        }
    return v;
}

void export_triplets(const Eigen::SparseMatrix<double>& m, std::ostream& out) {
    char buf[80];
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
            std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n",
                          static_cast<long>(it.row()), static_cast<long>(it.col()), it.value());
            out << buf;
        }
}

} // namespace strips
