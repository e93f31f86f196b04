#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "sigf/graph.hpp"
#include "sigf/linalg.hpp"

namespace sigf {

// The d_h algebraically smallest eigenpairs of the combined signed
// Laplacian. Row v of node_coords holds node v's coordinates in the
// eigenbasis, so the pairwise proximity score is a plain dot product.
struct SpectralBasis {
    int d_h = 0;
    Eigen::VectorXd eigenvalues;  // ascending, size d_h
    RowMat node_coords;           // order x d_h, column k = k-th eigenvector

    double pair_score(std::int32_t v, std::int32_t w) const {
        return node_coords.row(v).dot(node_coords.row(w));
    }
};

enum class EigenMethod { Auto, Dense, Lanczos };

// Auto switches from the dense solver to Lanczos above this order.
inline constexpr std::int32_t kDenseOrderLimit = 3000;

// Computes the basis, fixes eigenvector signs (first component whose
// magnitude exceeds 1e-12 of the column max is made positive), and
// validates residuals and orthonormality before returning. d_h larger
// than the graph order is clamped; callers compare basis.d_h against the
// request if they want to warn.
SpectralBasis eigendecompose(const SignedBipartiteGraph& graph, double alpha, int d_h,
                             EigenMethod method = EigenMethod::Auto);

// Signed smoothness objective over an orthonormal set Z (order x q):
//   sum_{(u,i) in E+} (z_u/sqrt(d_u+) - z_i/sqrt(d_i+))^2
// - alpha * sum_{(u,i) in E-} (z_u/sqrt(d_u-) - z_i/sqrt(d_i-))^2,
// summed over columns, each edge counted once. Equals
// (1 - alpha) * trace(Z' L Z), so the spectral basis minimizes it and
// attains (1 - alpha) * sum of the q smallest eigenvalues.
double lemma1_objective(const SignedBipartiteGraph& graph, double alpha,
                        const Eigen::MatrixXd& Z);

// Cache file: text header and eigenvalues, then the eigenvector matrix as
// raw little-endian doubles in row-major node order.
void write_spectrum(const std::string& path, const SpectralBasis& basis, double alpha);

struct SpectrumFile {
    double alpha = 0.0;
    SpectralBasis basis;
};

SpectrumFile read_spectrum(const std::string& path);

}  // namespace sigf
