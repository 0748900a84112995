#pragma once

#include "strips/forms.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace strips {

struct EigenPair {
    double value = 0.0;
    Eigen::VectorXd vector; // M-normalized
    double residual = 0.0;  // ||A v - lambda M v|| / ||M v||
    bool degenerate = false; // relative gap to a neighbour below 1e-8
};

struct SolveOptions {
    double shift = -1.0;
    int max_iterations = 500;
    unsigned seed = 42;
};

// Smallest `count` eigenpairs of A v = lambda M v by shift-invert Lanczos
// with full reorthogonalization in the M inner product; the shifted matrix
// A - shift M is factorized once (sparse LDLT).
std::vector<EigenPair> solve_smallest(const DiscreteForms& forms, int count, double tol,
                                      const SolveOptions& opts = {});

// Flips the vector sign when its M-inner product with the reference is
// negative; idempotent. Throws DegenerateAlignment when the normalized
// inner product is below 1e-8.
EigenPair align_sign(EigenPair pair, const Eigen::VectorXd& reference,
                     const Eigen::SparseMatrix<double>& mass);

struct ResolventEstimate {
    double norm_estimate = 0.0;
    int iterations = 0;
    double tolerance_achieved = 0.0;
};

// Operator-norm estimate of the discrete resolvent difference
//   D = U (A_eps + M_eps)^-1 M_eps U^-1 - (A_0 + M_0)^-1 M_0
// in the flat L^2(Pi) inner product, where U is node-wise multiplication by
// f^(1/2). Power iteration on D*D (adjoint taken in the M_0 inner product),
// so the returned value is a convergent lower bound on the largest singular
// value.
ResolventEstimate resolvent_gap(const DiscreteForms& forms_eps, const DiscreteForms& forms_flat,
                                const MetricField& metric, double tol, unsigned seed = 42,
                                int max_iterations = 500);

} // namespace strips
