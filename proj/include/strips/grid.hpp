#pragma once

#include "strips/errors.hpp"

namespace strips {

// Uniform tensor grid on the closed reference rectangle [0,L] x [-1,1].
// Nodes are indexed (i, j) with i along s and j along t; the linear index
// runs t-major so a row of the flattened vector is one t-level.
struct GridSpec {
    double L = 1.0;
    int n_s = 2;
    int n_t = 3;

    double h_s() const { return L / (n_s - 1); }
    double h_t() const { return 2.0 / (n_t - 1); }
    double s(int i) const { return i * h_s(); }
    double t(int j) const { return -1.0 + j * h_t(); }
    int index(int i, int j) const { return j * n_s + i; }
    int size() const { return n_s * n_t; }

    // Assembly-grade validity (stricter than the bare Jacobi-solver grid).
    void require_assembly_grade() const {
        if (L <= 0.0)
            throw PreconditionViolated("GridSpec: L must be positive");
        if (n_s < 8)
            throw PreconditionViolated("GridSpec: n_s must be at least 8");
        if (n_t < 3 || n_t % 2 == 0)
            throw PreconditionViolated("GridSpec: n_t must be odd and at least 3");
    }
};

} // namespace strips
