#include "sigf/spectral.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "sigf/eigensolver.hpp"
#include "sigf/errors.hpp"
#include "sigf/laplacian.hpp"

static_assert(std::endian::native == std::endian::little,
              "spectrum cache assumes a little-endian host");

namespace sigf {

namespace {

// Lanczos start vectors come from a fixed stream so the basis is a pure
// function of the graph, alpha, and d_h.
constexpr std::uint64_t kSpectrumSeed = 0x5ec7ba5eULL;

void fix_signs(RowMat& coords) {
    for (Eigen::Index c = 0; c < coords.cols(); ++c) {
        const double max_abs = coords.col(c).cwiseAbs().maxCoeff();
        const double cutoff = 1e-12 * max_abs;
        for (Eigen::Index r = 0; r < coords.rows(); ++r) {
            const double x = coords(r, c);
            if (std::abs(x) > cutoff) {
                if (x < 0.0) coords.col(c) *= -1.0;
                break;
            }
        }
    }
}

void validate_basis(const SignedLaplacian& lap, const SpectralBasis& basis) {
    for (int j = 0; j < basis.d_h; ++j) {
        Eigen::VectorXd h = basis.node_coords.col(j);
        const double lambda = basis.eigenvalues[j];
        const double resid = (lap.matrix() * h - lambda * h).norm();
        if (!(resid <= 1e-6 * std::max(1.0, std::abs(lambda)))) {
            std::ostringstream os;
            os << "eigenpair " << j << " residual " << resid << " exceeds tolerance";
            throw numeric_error(os.str());
        }
    }
    Eigen::MatrixXd gram = basis.node_coords.transpose() * basis.node_coords;
    gram.diagonal().array() -= 1.0;
    if (!(gram.cwiseAbs().maxCoeff() <= 1e-8)) {
        throw numeric_error("spectral basis lost orthonormality");
    }
}

}  // namespace

SpectralBasis eigendecompose(const SignedBipartiteGraph& graph, double alpha, int d_h,
                             EigenMethod method) {
    if (d_h < 1) throw usage_error("spectral dimension must be positive");
    const std::int32_t order = graph.order();
    if (d_h > order) d_h = order;

    const SignedLaplacian lap = SignedLaplacian::build(graph, alpha);

    const bool dense = method == EigenMethod::Dense ||
                       (method == EigenMethod::Auto && order <= kDenseOrderLimit);
    EigenPairs pairs = dense
        ? dense_smallest(Eigen::MatrixXd(lap.matrix()), d_h)
        : lanczos_smallest(lap.matrix(), d_h, kSpectrumSeed);

    SpectralBasis basis;
    basis.d_h = d_h;
    basis.eigenvalues = std::move(pairs.values);
    basis.node_coords = pairs.vectors;
    fix_signs(basis.node_coords);
    validate_basis(lap, basis);
    return basis;
}

double lemma1_objective(const SignedBipartiteGraph& graph, double alpha,
                        const Eigen::MatrixXd& Z) {
    if (Z.rows() != graph.order()) {
        throw usage_error("objective input has wrong number of rows");
    }
    Eigen::MatrixXd gram = Z.transpose() * Z;
    gram.diagonal().array() -= 1.0;
    if (!(gram.cwiseAbs().maxCoeff() <= 1e-8)) {
        throw usage_error("objective requires orthonormal columns");
    }

    double pos_sum = 0.0;
    double neg_sum = 0.0;
    // Every edge joins a user to an item, so scanning user rows of the
    // adjacency covers each edge exactly once.
    for (std::int32_t u = 0; u < graph.n(); ++u) {
        const double du_pos = static_cast<double>(graph.pos_degree(u));
        for (std::int32_t w : graph.pos_neighbors(u)) {
            const double dw_pos = static_cast<double>(graph.pos_degree(w));
            for (Eigen::Index c = 0; c < Z.cols(); ++c) {
                const double diff = Z(u, c) / std::sqrt(du_pos) - Z(w, c) / std::sqrt(dw_pos);
                pos_sum += diff * diff;
            }
        }
        const double du_neg = static_cast<double>(graph.neg_degree(u));
        for (std::int32_t w : graph.neg_neighbors(u)) {
            const double dw_neg = static_cast<double>(graph.neg_degree(w));
            for (Eigen::Index c = 0; c < Z.cols(); ++c) {
                const double diff = Z(u, c) / std::sqrt(du_neg) - Z(w, c) / std::sqrt(dw_neg);
                neg_sum += diff * diff;
            }
        }
    }
    return pos_sum - alpha * neg_sum;
}

void write_spectrum(const std::string& path, const SpectralBasis& basis, double alpha) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open spectrum file for writing: " + path);

    char buf[64];
    out << "SIGSPEC 1 " << basis.node_coords.rows() << ' ' << basis.d_h << ' ';
    std::snprintf(buf, sizeof(buf), "%.17g", alpha);
    out << buf << '\n';
    for (int i = 0; i < basis.d_h; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", basis.eigenvalues[i]);
        out << buf << '\n';
    }
    out.write(reinterpret_cast<const char*>(basis.node_coords.data()),
              static_cast<std::streamsize>(sizeof(double)) * basis.node_coords.size());
    if (!out) throw data_error("failed writing spectrum file: " + path);
}

SpectrumFile read_spectrum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open spectrum file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw data_error("spectrum file is empty: " + path);
    std::istringstream header(line);
    std::string magic;
    int version = 0;
    std::int64_t order = 0;
    int d_h = 0;
    double alpha = 0.0;
    if (!(header >> magic >> version >> order >> d_h >> alpha) || magic != "SIGSPEC" ||
        version != 1) {
        throw data_error("not a spectrum file: " + path);
    }
    if (order < 1 || d_h < 1 || d_h > order) {
        throw data_error("spectrum file header is inconsistent: " + path);
    }

    SpectrumFile file;
    file.alpha = alpha;
    file.basis.d_h = d_h;
    file.basis.eigenvalues.resize(d_h);
    for (int i = 0; i < d_h; ++i) {
        if (!std::getline(in, line)) {
            throw data_error("spectrum file truncated in eigenvalues: " + path);
        }
        try {
            file.basis.eigenvalues[i] = std::stod(line);
        } catch (const std::exception&) {
            throw data_error("bad eigenvalue in spectrum file: " + path);
        }
    }
    file.basis.node_coords.resize(order, d_h);
    in.read(reinterpret_cast<char*>(file.basis.node_coords.data()),
            static_cast<std::streamsize>(sizeof(double)) * file.basis.node_coords.size());
    if (in.gcount() !=
        static_cast<std::streamsize>(sizeof(double)) * file.basis.node_coords.size()) {
        throw data_error("spectrum file truncated in eigenvectors: " + path);
    }
    return file;
}

}  // namespace sigf
