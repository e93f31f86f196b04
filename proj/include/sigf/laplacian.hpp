#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sigf/graph.hpp"

namespace sigf {

// Combined signed Laplacian L = (1/(1-alpha)) * (L+ - alpha*L-), where L+/L-
// are the symmetric-normalized Laplacians of the positive/negative graphs.
// Zero-degree convention: a node isolated in G+ contributes a 0 (not 1)
// diagonal to the L+ term, so z'L+z equals the per-edge sum
// sum_{(u,i) in E+} (z_u/sqrt(d_u+) - z_i/sqrt(d_i+))^2, and likewise for L-.
class SignedLaplacian {
public:
    static SignedLaplacian build(const SignedBipartiteGraph& graph, double alpha);

    std::int32_t order() const { return order_; }
    double alpha() const { return alpha_; }
    const Eigen::SparseMatrix<double>& matrix() const { return mat_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return mat_ * x; }

    // Gershgorin upper bound on the spectrum; used to shift the operator
    // when hunting the algebraically smallest eigenvalues.
    double gershgorin_upper() const;

private:
    std::int32_t order_ = 0;
    double alpha_ = 0.0;
    Eigen::SparseMatrix<double> mat_;
};

}  // namespace sigf
