#include "strips/solver.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <random>

namespace strips {

namespace {

Eigen::VectorXd random_vector(int n, std::mt19937& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
        v[i] = dist(rng);
    return v;
}

} // namespace

std::vector<EigenPair> solve_smallest(const DiscreteForms& forms, int count, double tol,
                                      const SolveOptions& opts) {
    if (count < 1 || count > 12)
        throw PreconditionViolated("solve_smallest: count must be in [1, 12]");
    if (tol < 1e-12 || tol > 1e-6)
        throw PreconditionViolated("solve_smallest: tol must be in [1e-12, 1e-6]");

    const Eigen::SparseMatrix<double>& A = forms.stiffness;
    const Eigen::SparseMatrix<double>& M = forms.mass;
    const int n = static_cast<int>(A.rows());
    if (count > n)
        throw PreconditionViolated("solve_smallest: count exceeds problem size");

    Eigen::SparseMatrix<double> shifted = A - opts.shift * M;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fact(shifted);
    if (fact.info() != Eigen::Success)
        throw FactorizationFailure("solve_smallest: LDLT of the shifted matrix failed "
                                   "(broken assembly?)");

    const int m_cap = std::min(n, std::max(4 * count + 20, 40));
    Eigen::MatrixXd V(n, m_cap);      // Lanczos basis, M-orthonormal
    Eigen::MatrixXd MV(n, m_cap);     // M * basis, cached for reorthogonalization
    Eigen::VectorXd alpha(m_cap), beta(m_cap);

    std::mt19937 rng(opts.seed);
    Eigen::VectorXd v = random_vector(n, rng);
    Eigen::VectorXd Mv = M * v;
    v /= std::sqrt(v.dot(Mv));
    V.col(0) = v;
    MV.col(0) = M * v;

    auto ritz_pairs = [&](int k) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < k) {
                T(i, i + 1) = beta[i];
                T(i + 1, i) = beta[i];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        return es; // eigenvalues ascending; largest theta = smallest lambda
    };

    int iterations = 0;
    int k = 0; // current basis size
    std::vector<EigenPair> result;

    while (iterations < opts.max_iterations && k < m_cap) {
        // one Lanczos step: w = (A - shift M)^-1 M v_k
        Eigen::VectorXd w = fact.solve(MV.col(k));
        alpha[k] = w.dot(MV.col(k));
        w -= alpha[k] * V.col(k);
        if (k > 0)
            w -= beta[k - 1] * V.col(k - 1);
        // full reorthogonalization, two passes
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXd h = MV.leftCols(k + 1).transpose() * w;
            w -= V.leftCols(k + 1) * h;
        }
        Eigen::VectorXd Mw = M * w;
        double b = std::sqrt(std::max(w.dot(Mw), 0.0));
        if (b < 1e-14) {
            // invariant subspace found; restart direction
            w = random_vector(n, rng);
            for (int pass = 0; pass < 2; ++pass) {
                Eigen::VectorXd h = MV.leftCols(k + 1).transpose() * w;
                w -= V.leftCols(k + 1) * h;
            }
            Mw = M * w;
            b = std::sqrt(std::max(w.dot(Mw), 0.0));
            beta[k] = 0.0;
            if (b < 1e-14)
                break; // space exhausted
            w /= b;
        } else {
            beta[k] = b;
            w /= b;
            Mw /= b;
        }
        ++k;
        if (k < m_cap) {
            V.col(k) = w;
            MV.col(k) = M * w;
        }
        ++iterations;

        if (k < count + 2 && k < n)
            continue;

        auto es = ritz_pairs(k);
        result.clear();
        bool all_converged = true;
        for (int c = 0; c < count; ++c) {
            const double theta = es.eigenvalues()[k - 1 - c];
            if (theta <= 0.0) {
                all_converged = false;
                break;
            }
            EigenPair p;
            p.value = opts.shift + 1.0 / theta;
            Eigen::VectorXd y = V.leftCols(k) * es.eigenvectors().col(k - 1 - c);
            Eigen::VectorXd My = M * y;
            y /= std::sqrt(y.dot(My));
            p.vector = y;
            p.residual = (A * y - p.value * (M * y)).norm() / (M * y).norm();
            if (p.residual > tol)
                all_converged = false;
            result.push_back(std::move(p));
        }
        if (all_converged && static_cast<int>(result.size()) == count) {
            std::sort(result.begin(), result.end(),
                      [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
            for (size_t i = 0; i + 1 < result.size(); ++i) {
                const double gap = std::abs(result[i + 1].value - result[i].value);
                if (gap < 1e-8 * std::max({std::abs(result[i].value),
                                           std::abs(result[i + 1].value), 1.0})) {
                    result[i].degenerate = true;
                    result[i + 1].degenerate = true;
                }
            }
            return result;
        }
    }

    throw NoConvergence("solve_smallest: residual tolerance not reached within the "
                        "iteration cap");
}

EigenPair align_sign(EigenPair pair, const Eigen::VectorXd& reference,
                     const Eigen::SparseMatrix<double>& mass) {
    const Eigen::VectorXd Mr = mass * reference;
    const double rn = std::sqrt(reference.dot(Mr));
    if (rn == 0.0)
        throw PreconditionViolated("align_sign: reference must be nonzero");
    const double vn = std::sqrt(pair.vector.dot(mass * pair.vector));
    const double ip = pair.vector.dot(Mr) / (rn * vn);
    if (std::abs(ip) < 1e-8)
        throw DegenerateAlignment("align_sign: M-inner product with the reference is "
                                  "numerically zero (crossing or wrong mode pairing)");
    if (ip < 0.0)
        pair.vector = -pair.vector;
    return pair;
}

ResolventEstimate resolvent_gap(const DiscreteForms& forms_eps, const DiscreteForms& forms_flat,
                                const MetricField& metric, double tol, unsigned seed,
                                int max_iterations) {
    const GridSpec& grid = forms_flat.grid;
    if (forms_eps.grid.n_s != grid.n_s || forms_eps.grid.n_t != grid.n_t ||
        forms_eps.grid.L != grid.L)
        throw PreconditionViolated("resolvent_gap: forms must share one grid");
    if (static_cast<int>(metric.f.size()) != grid.size())
        throw PreconditionViolated("resolvent_gap: metric does not match the grid");

    const int n = grid.size();
    Eigen::VectorXd w_half(n), w_half_inv(n);
    for (int i = 0; i < n; ++i) {
        w_half[i] = std::sqrt(metric.f[i]);
        w_half_inv[i] = 1.0 / w_half[i];
    }

    Eigen::SparseMatrix<double> shifted_eps = forms_eps.stiffness + forms_eps.mass;
    Eigen::SparseMatrix<double> shifted_flat = forms_flat.stiffness + forms_flat.mass;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fact_eps(shifted_eps);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fact_flat(shifted_flat);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fact_m0(forms_flat.mass);
    if (fact_eps.info() != Eigen::Success || fact_flat.info() != Eigen::Success ||
        fact_m0.info() != Eigen::Success)
        throw FactorizationFailure("resolvent_gap: factorization failed");

    const Eigen::SparseMatrix<double>& Meps = forms_eps.mass;
    const Eigen::SparseMatrix<double>& M0 = forms_flat.mass;

    auto applyD = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd weighted = fact_eps.solve(Meps * w_half_inv.cwiseProduct(x));
        return w_half.cwiseProduct(weighted) - fact_flat.solve(M0 * x);
    };
    auto applyDadj = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        // M0-adjoint: M0^-1 D^T M0
        Eigen::VectorXd y = fact_eps.solve(w_half.cwiseProduct(M0 * x));
        y = fact_m0.solve(w_half_inv.cwiseProduct(Meps * y));
        return y - fact_flat.solve(M0 * x);
    };

    std::mt19937 rng(seed);
    Eigen::VectorXd x = random_vector(n, rng);
    x /= std::sqrt(x.dot(M0 * x));

    ResolventEstimate est;
    double rho_prev = -1.0;
    for (int it = 1; it <= max_iterations; ++it) {
        est.iterations = it;
        Eigen::VectorXd Dx = applyD(x);
        const double rho = Dx.dot(M0 * Dx); // = ||D x||_{M0}^2, sigma_max^2 estimate
        est.norm_estimate = std::sqrt(std::max(rho, 0.0));
        if (rho < 1e-30) {
            est.tolerance_achieved = 0.0;
            return est; // D annihilates the start vector (flat metric)
        }
        if (rho_prev >= 0.0) {
            est.tolerance_achieved = std::abs(rho - rho_prev) / rho;
            if (est.tolerance_achieved < tol)
                return est;
        }
        rho_prev = rho;
        Eigen::VectorXd z = applyDadj(Dx);
        const double zn = std::sqrt(z.dot(M0 * z));
        if (zn < 1e-300) {
            est.tolerance_achieved = 0.0;
            return est;
        }
        x = z / zn;
    }
    throw NoConvergence("resolvent_gap: power iteration did not settle within the cap");
}

} // namespace strips
