#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sigf/linalg.hpp"
#include "sigf/sampler.hpp"
#include "sigf/spectral.hpp"

namespace sigf {

double softplus(double x);

// Learnable state. Per layer there is one scalar blend weight for the
// spectral pair score (stored pre-softplus so the effective weight stays
// positive) and one bias per path type. Embeddings cover users then items:
// node id of item i is n + i.
struct ModelParams {
    int d = 0;
    int layers = 0;
    RowMat embeddings;                 // order x d, the layer-0 table
    std::vector<double> theta_raw;     // size layers
    std::vector<Eigen::VectorXd> phi;  // size layers, each type_count

    static ModelParams init(std::int32_t order, int d, int layers,
                            std::int32_t type_count, std::uint64_t seed);

    double theta(int layer) const { return softplus(theta_raw[static_cast<std::size_t>(layer)]); }
};

struct EmbeddingStack {
    std::vector<RowMat> layers;  // layers + 1 matrices, element 0 is the table
    RowMat final;                // mean over the stack
};

// Attention weights kept for the backward pass, aligned with the SampleSet
// layout: weight of occurrence j of node v in layer l sits at
// a1[l - 1][set.offsets[v] + j].
struct ForwardCache {
    EmbeddingStack stack;
    std::vector<std::vector<double>> a1;
    std::vector<std::vector<double>> a2;
};

// Spectral proximity per sample occurrence, aligned with set.targets. The
// dense node-pair score matrix is never formed; only sampled pairs are
// evaluated.
std::vector<double> pair_score_cache(const SpectralBasis& basis, const SampleSet& set);

// Per layer, a node with samples attends over its occurrences with two
// softmax distributions, one over scaled embedding dot products shifted by
// the weighted pair score and one over path-type biases, and averages the
// two mixtures. Nodes without samples carry their previous embedding
// forward. The published embedding is the mean over all layers.
EmbeddingStack forward(const ModelParams& params, const SampleSet& set,
                       const std::vector<double>& pair_scores);
ForwardCache forward_cached(const ModelParams& params, const SampleSet& set,
                            const std::vector<double>& pair_scores);

inline double predict(const RowMat& final_embeddings, std::int32_t user,
                      std::int32_t item_node) {
    return final_embeddings.row(user).dot(final_embeddings.row(item_node));
}

}  // namespace sigf
