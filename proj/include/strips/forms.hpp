#pragma once

#include "strips/geometry.hpp"
#include "strips/grid.hpp"

#include <Eigen/Sparse>
#include <Eigen/Dense>

#include <ostream>
#include <vector>

namespace strips {

// Sparse stiffness/mass pair realizing the quadratic form
//   a[psi] = int f^-1 |d_s psi|^2 + eps^-2 int f |d_t psi|^2,
//   m[psi] = int f |psi|^2,
// on bilinear tensor-product elements with natural Neumann conditions.
// The flat variant has f = 1.
struct DiscreteForms {
    GridSpec grid;
    double epsilon = 0.0;
    Eigen::SparseMatrix<double> stiffness;
    Eigen::SparseMatrix<double> mass;
};

DiscreteForms assemble_eps(const MetricField& metric);
DiscreteForms assemble_flat(const GridSpec& grid, double epsilon);

struct ReferenceMode {
    double lambda;
    int n; // longitudinal index, lambda_n = ((n-1) pi / L)^2
    int m; // transverse index,   nu_m = (m pi / (2 eps))^2
};

// The `count` smallest values of lambda_n + nu_m, nondecreasing, ties broken
// by (m, n) lexicographic.
std::vector<ReferenceMode> reference_spectrum(double L, double epsilon, int count);

// psi_n^0(s, t) = u_n^0(s) / sqrt(2), continuum-normalized in L^2(Pi).
Eigen::VectorXd sample_psi0(int n, const GridSpec& grid);

// Coordinate-triplet text dump (row col value, 17 significant digits).
void export_triplets(const Eigen::SparseMatrix<double>& m, std::ostream& out);

} // namespace strips
