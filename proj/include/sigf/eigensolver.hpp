#pragma once

#include <cstdint>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace sigf {

struct EigenPairs {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // order x k, orthonormal columns matching values
};

// Full symmetric eigendecomposition, truncated to the k algebraically
// smallest pairs. Cost is O(order^3); intended for order up to a few
// thousand and as the cross-check oracle for the iterative path.
EigenPairs dense_smallest(const Eigen::MatrixXd& sym, int k);

// Restarted Lanczos with full reorthogonalization and locking. Converged
// pairs are frozen and deflated from later cycles, so clustered and
// repeated eigenvalues are recovered one copy per restart. Residual test
// per pair: ||A y - theta y|| <= tol * max(1, |theta|).
EigenPairs lanczos_smallest(const Eigen::SparseMatrix<double>& sym, int k,
                            std::uint64_t seed, double tol = 1e-8);

}  // namespace sigf
