#include "doctest.h"

#include "strips/forms.hpp"
#include "strips/presets.hpp"
#include "strips/solver.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace strips;

namespace {

// discrete tensor-product spectrum of the bilinear-element stencil on a
// uniform Neumann grid: 1D generalized eigenvalues are
//   mu_k = (6/h^2) (1 - cos th) / (2 + cos th), th = k pi / (nodes - 1),
// and the 2D values are mu_s + eps^-2 mu_t.
std::vector<double> stencil_spectrum(const GridSpec& grid, double eps, int count) {
    auto one_d = [](int nodes, double h) {
        std::vector<double> mu;
        for (int k = 0; k < nodes; ++k) {
            const double th = k * M_PI / (nodes - 1);
            mu.push_back(6.0 / (h * h) * (1.0 - std::cos(th)) / (2.0 + std::cos(th)));
        }
        return mu;
    };
    const auto ms = one_d(grid.n_s, grid.h_s());
    const auto mt = one_d(grid.n_t, grid.h_t());
    std::vector<double> all;
    for (double a : ms)
        for (double b : mt)
            all.push_back(a + b / (eps * eps));
    std::sort(all.begin(), all.end());
    all.resize(count);
    return all;
}

MetricField arc_metric(double eps, int n_s, int n_t, double curvature = 0.5) {
    return solve_jacobi(make_preset("flat-arc", {.curvature = curvature, .epsilon = eps}), n_s, n_t);
}

} // namespace

TEST_CASE("solver reproduces the discrete stencil spectrum to 1e-9") {
    const GridSpec grid{M_PI, 48, 9};
    const DiscreteForms f = assemble_flat(grid, 0.1);
    const auto pairs = solve_smallest(f, 6, 1e-10);
    const auto exact = stencil_spectrum(grid, 0.1, 6);
    for (int k = 0; k < 6; ++k)
        CHECK(std::abs(pairs[k].value - exact[k]) <= 1e-9 * std::max(1.0, exact[k]));
}

TEST_CASE("flat strip values [0, 1, 4] at 256x9") {
    const DiscreteForms f = assemble_flat({M_PI, 256, 9}, 0.1);
    const auto pairs = solve_smallest(f, 3, 1e-10);
    CHECK(std::abs(pairs[0].value) < 5e-3);
    CHECK(std::abs(pairs[1].value - 1.0) < 5e-3);
    CHECK(std::abs(pairs[2].value - 4.0) < 5e-3);
    for (const auto& p : pairs)
        CHECK(p.residual <= 1e-10);
}

TEST_CASE("ground state is zero with a constant eigenvector") {
    const MetricField m = arc_metric(0.05, 48, 9);
    const auto pairs = solve_smallest(assemble_eps(m), 1, 1e-10);
    CHECK(std::abs(pairs[0].value) < 1e-9);
    const Eigen::VectorXd& v = pairs[0].vector;
    CHECK((v.maxCoeff() - v.minCoeff()) / std::abs(v.maxCoeff()) < 1e-7);
}

TEST_CASE("coarse-grid cross-check against a dense solve") {
    const MetricField m = arc_metric(0.05, 48, 5);
    const DiscreteForms f = assemble_eps(m);
    const auto pairs = solve_smallest(f, 2, 1e-10);

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dense(
        Eigen::MatrixXd(f.stiffness), Eigen::MatrixXd(f.mass));
    CHECK(pairs[1].value == doctest::Approx(dense.eigenvalues()[1]).epsilon(1e-9));

    // lambda_2^eps close to lambda_2^0 = (pi/L)^2 at small eps
    CHECK(std::abs(pairs[1].value - 1.0) < 0.05);
}

TEST_CASE("returned basis is M-orthonormal") {
    const MetricField m = arc_metric(0.1, 64, 9);
    const DiscreteForms f = assemble_eps(m);
    const double tol = 1e-10;
    const auto pairs = solve_smallest(f, 5, tol);
    for (size_t a = 0; a < pairs.size(); ++a)
        for (size_t b = 0; b < pairs.size(); ++b) {
            const double ip = pairs[a].vector.dot(f.mass * pairs[b].vector);
            CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) <= 10.0 * tol);
        }
}

TEST_CASE("shift-invert results are shift invariant") {
    const DiscreteForms f = assemble_flat({2.0, 40, 9}, 0.1);
    SolveOptions s1, s2;
    s1.shift = -1.0;
    s2.shift = -0.5;
    const auto a = solve_smallest(f, 4, 1e-11, s1);
    const auto b = solve_smallest(f, 4, 1e-11, s2);
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(a[k].value - b[k].value) <= 1e-10 * std::max(1.0, std::abs(a[k].value)));
}

TEST_CASE("solver precondition checks") {
    const DiscreteForms f = assemble_flat({1.0, 16, 5}, 0.1);
    CHECK_THROWS_AS(solve_smallest(f, 13, 1e-10), PreconditionViolated);
    CHECK_THROWS_AS(solve_smallest(f, 2, 1e-5), PreconditionViolated);
    CHECK_THROWS_AS(solve_smallest(f, 2, 1e-13), PreconditionViolated);
}

TEST_CASE("align_sign flips and is idempotent") {
    const DiscreteForms f = assemble_flat({M_PI, 32, 5}, 0.1);
    const Eigen::VectorXd ref = sample_psi0(2, f.grid);
    EigenPair p;
    p.vector = ref;
    const EigenPair same = align_sign(p, ref, f.mass);
    CHECK(same.vector == ref);
    p.vector = -ref;
    const EigenPair flipped = align_sign(p, ref, f.mass);
    CHECK(flipped.vector == ref);
    const EigenPair again = align_sign(flipped, ref, f.mass);
    CHECK(again.vector == ref);
}

TEST_CASE("align_sign rejects orthogonal references") {
    const DiscreteForms f = assemble_flat({M_PI, 32, 5}, 0.1);
    EigenPair p;
    p.vector = sample_psi0(2, f.grid);
    CHECK_THROWS_AS(align_sign(p, sample_psi0(3, f.grid), f.mass), DegenerateAlignment);
}

TEST_CASE("computed psi_2^eps is near-parallel to sampled psi_2^0") {
    const MetricField m = arc_metric(0.05, 96, 9);
    const DiscreteForms f = assemble_eps(m);
    const DiscreteForms flat = assemble_flat(m.grid, m.epsilon);
    const auto pairs = solve_smallest(f, 2, 1e-10);
    const Eigen::VectorXd ref = sample_psi0(2, f.grid);
    const EigenPair aligned = align_sign(pairs[1], ref, flat.mass);
    const double ip = aligned.vector.dot(flat.mass * ref) /
                      std::sqrt(ref.dot(flat.mass * ref)) /
                      std::sqrt(aligned.vector.dot(flat.mass * aligned.vector));
    CHECK(ip > 0.9);
}

TEST_CASE("resolvent gap vanishes for the flat metric") {
    const MetricField m = solve_jacobi(make_preset("flat-line", {.epsilon = 0.1}), 48, 9);
    const DiscreteForms fe = assemble_eps(m);
    const DiscreteForms ff = assemble_flat(m.grid, 0.1);
    const ResolventEstimate est = resolvent_gap(fe, ff, m, 1e-8);
    CHECK(est.norm_estimate <= 1e-12);
}

TEST_CASE("resolvent gap estimate dominates random Rayleigh quotients") {
    const MetricField m = arc_metric(0.1, 48, 9, 1.0);
    const DiscreteForms fe = assemble_eps(m);
    const DiscreteForms ff = assemble_flat(m.grid, 0.1);
    const ResolventEstimate est = resolvent_gap(fe, ff, m, 1e-10);
    CHECK(est.norm_estimate > 0.0);

    // re-build D by hand and check ||D w|| / ||w|| <= estimate for 5 random w
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> se(
        Eigen::SparseMatrix<double>(fe.stiffness + fe.mass));
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> sf(
        Eigen::SparseMatrix<double>(ff.stiffness + ff.mass));
    Eigen::VectorXd half(m.grid.size()), half_inv(m.grid.size());
    for (int i = 0; i < m.grid.size(); ++i) {
        half[i] = std::sqrt(m.f[i]);
        half_inv[i] = 1.0 / half[i];
    }
    std::mt19937 rng(7);
    std::normal_distribution<double> dist;
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd w(m.grid.size());
        for (int i = 0; i < w.size(); ++i)
            w[i] = dist(rng);
        const Eigen::VectorXd Dw =
            half.cwiseProduct(se.solve(fe.mass * half_inv.cwiseProduct(w))) -
            sf.solve(ff.mass * w);
        const double num = std::sqrt(Dw.dot(ff.mass * Dw));
        const double den = std::sqrt(w.dot(ff.mass * w));
        CHECK(num / den <= est.norm_estimate * (1.0 + 1e-6));
    }
}

TEST_CASE("two random starts of the gap estimator agree") {
    const MetricField m = arc_metric(0.1, 48, 9, 1.0);
    const DiscreteForms fe = assemble_eps(m);
    const DiscreteForms ff = assemble_flat(m.grid, 0.1);
    const ResolventEstimate a = resolvent_gap(fe, ff, m, 1e-8, 42);
    const ResolventEstimate b = resolvent_gap(fe, ff, m, 1e-8, 1234);
    CHECK(std::abs(a.norm_estimate - b.norm_estimate) <= 0.01 * a.norm_estimate);
}

TEST_CASE("resolvent gap bounds the spectral-mapping eigenvalue difference") {
    const MetricField m = arc_metric(0.1, 64, 9, 1.0);
    const DiscreteForms fe = assemble_eps(m);
    const DiscreteForms ff = assemble_flat(m.grid, 0.1);
    const double tol = 1e-9;
    const ResolventEstimate est = resolvent_gap(fe, ff, m, tol);
    const double l_eps = solve_smallest(fe, 2, 1e-10)[1].value;
    const double l_flat = solve_smallest(ff, 2, 1e-10)[1].value;
    CHECK(std::abs(1.0 / (l_eps + 1.0) - 1.0 / (l_flat + 1.0)) <= est.norm_estimate + 10.0 * tol);
}
