#include "sigf/laplacian.hpp"

#include <cmath>
#include <vector>

#include "sigf/errors.hpp"

namespace sigf {

SignedLaplacian SignedLaplacian::build(const SignedBipartiteGraph& graph, double alpha) {
    if (!(alpha > -1.0 && alpha < 1.0)) {
        throw usage_error("alpha must lie in (-1, 1)");
    }
    const std::int32_t order = graph.order();

    std::vector<double> inv_sqrt_pos(order, 0.0);
    std::vector<double> inv_sqrt_neg(order, 0.0);
    for (std::int32_t v = 0; v < order; ++v) {
        const auto dp = graph.pos_degree(v);
        const auto dn = graph.neg_degree(v);
        if (dp > 0) inv_sqrt_pos[v] = 1.0 / std::sqrt(static_cast<double>(dp));
        if (dn > 0) inv_sqrt_neg[v] = 1.0 / std::sqrt(static_cast<double>(dn));
    }

    const double scale = 1.0 / (1.0 - alpha);

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(order) +
                  2 * static_cast<std::size_t>(graph.pos_edge_count() + graph.neg_edge_count()));
    for (std::int32_t v = 0; v < order; ++v) {
        double diag = 0.0;
        if (graph.pos_degree(v) > 0) diag += 1.0;
        if (graph.neg_degree(v) > 0) diag -= alpha;
        if (diag != 0.0) trips.emplace_back(v, v, scale * diag);
        // Grouping the degree product first keeps the (v, w) and (w, v)
        // entries bitwise equal, so the matrix is exactly symmetric.
        for (std::int32_t w : graph.pos_neighbors(v)) {
            trips.emplace_back(v, w, -scale * (inv_sqrt_pos[v] * inv_sqrt_pos[w]));
        }
        for (std::int32_t w : graph.neg_neighbors(v)) {
            trips.emplace_back(v, w, (scale * alpha) * (inv_sqrt_neg[v] * inv_sqrt_neg[w]));
        }
    }

    SignedLaplacian lap;
    lap.order_ = order;
    lap.alpha_ = alpha;
    lap.mat_.resize(order, order);
    lap.mat_.setFromTriplets(trips.begin(), trips.end());
    lap.mat_.makeCompressed();
    return lap;
}

double SignedLaplacian::gershgorin_upper() const {
    double bound = 0.0;
    for (int k = 0; k < mat_.outerSize(); ++k) {
        double diag = 0.0;
        double offsum = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(mat_, k); it; ++it) {
            if (it.row() == it.col()) {
                diag = it.value();
            } else {
                offsum += std::abs(it.value());
            }
        }
        bound = std::max(bound, diag + offsum);
    }
    return bound;
}

}  // namespace sigf
