#include "sigf/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sigf/errors.hpp"
#include "sigf/parallel.hpp"
#include "sigf/rng.hpp"

namespace sigf {

double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

namespace {

// softplus(kThetaRawInit) == 1, so every layer starts with unit weight on
// the spectral score.
const double kThetaRawInit = std::log(std::exp(1.0) - 1.0);

void check_inputs(const ModelParams& params, const SampleSet& set,
                  const std::vector<double>& pair_scores) {
    const auto order = static_cast<std::int64_t>(set.offsets.size()) - 1;
    if (params.embeddings.rows() != order) {
        throw usage_error("embedding table and sample set disagree on node count");
    }
    if (params.embeddings.cols() != params.d || params.d < 1) {
        throw usage_error("embedding table and dimension disagree");
    }
    if (static_cast<int>(params.theta_raw.size()) != params.layers ||
        static_cast<int>(params.phi.size()) != params.layers || params.layers < 1) {
        throw usage_error("per-layer parameter counts disagree with layer count");
    }
    if (pair_scores.size() != set.targets.size()) {
        throw usage_error("pair score cache does not match sample set");
    }
    std::int32_t max_type = -1;
    for (std::int32_t t : set.types) max_type = std::max(max_type, t);
    for (const auto& phi_l : params.phi) {
        if (max_type >= phi_l.size()) {
            throw usage_error("sample set contains a path type outside the bias table");
        }
    }
}

void run_forward(const ModelParams& params, const SampleSet& set,
                 const std::vector<double>& pair_scores, EmbeddingStack& stack,
                 ForwardCache* cache) {
    check_inputs(params, set, pair_scores);
    const auto order = static_cast<std::int32_t>(set.offsets.size()) - 1;
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(params.d));
    const std::size_t total = set.targets.size();

    stack.layers.clear();
    stack.layers.reserve(static_cast<std::size_t>(params.layers) + 1);
    stack.layers.push_back(params.embeddings);
    if (cache) {
        cache->a1.assign(static_cast<std::size_t>(params.layers),
                         std::vector<double>(total, 0.0));
        cache->a2.assign(static_cast<std::size_t>(params.layers),
                         std::vector<double>(total, 0.0));
    }

    for (int l = 1; l <= params.layers; ++l) {
        const RowMat& prev = stack.layers.back();
        RowMat next(order, params.d);
        const double theta_l = params.theta(l - 1);
        const Eigen::VectorXd& phi_l = params.phi[static_cast<std::size_t>(l - 1)];
        double* a1_out = cache ? cache->a1[static_cast<std::size_t>(l - 1)].data() : nullptr;
        double* a2_out = cache ? cache->a2[static_cast<std::size_t>(l - 1)].data() : nullptr;

        parallel_for(order, [&](std::int64_t vi) {
            const auto v = static_cast<std::int32_t>(vi);
            const std::int64_t base = set.offsets[static_cast<std::size_t>(v)];
            const std::int64_t count = set.size(v);
            if (count == 0) {
                next.row(v) = prev.row(v);
                return;
            }
            thread_local std::vector<double> w1;
            thread_local std::vector<double> w2;
            w1.resize(static_cast<std::size_t>(count));
            w2.resize(static_cast<std::size_t>(count));

            double max1 = -std::numeric_limits<double>::infinity();
            double max2 = max1;
            for (std::int64_t j = 0; j < count; ++j) {
                const std::size_t at = static_cast<std::size_t>(base + j);
                const std::int32_t w = set.targets[at];
                const double logit1 =
                    prev.row(v).dot(prev.row(w)) * inv_sqrt_d + theta_l * pair_scores[at];
                const double logit2 = phi_l[set.types[at]];
                w1[static_cast<std::size_t>(j)] = logit1;
                w2[static_cast<std::size_t>(j)] = logit2;
                max1 = std::max(max1, logit1);
                max2 = std::max(max2, logit2);
            }
            double sum1 = 0.0;
            double sum2 = 0.0;
            for (std::int64_t j = 0; j < count; ++j) {
                auto& x1 = w1[static_cast<std::size_t>(j)];
                auto& x2 = w2[static_cast<std::size_t>(j)];
                x1 = std::exp(x1 - max1);
                x2 = std::exp(x2 - max2);
                sum1 += x1;
                sum2 += x2;
            }
            auto row = next.row(v);
            row.setZero();
            for (std::int64_t j = 0; j < count; ++j) {
                const std::size_t at = static_cast<std::size_t>(base + j);
                const double a1 = w1[static_cast<std::size_t>(j)] / sum1;
                const double a2 = w2[static_cast<std::size_t>(j)] / sum2;
                row += 0.5 * (a1 + a2) * prev.row(set.targets[at]);
                if (a1_out) {
                    a1_out[at] = a1;
                    a2_out[at] = a2;
                }
            }
        });

        if (!next.allFinite()) {
            std::ostringstream os;
            os << "forward pass produced non-finite values in layer " << l;
            throw numeric_error(os.str());
        }
        stack.layers.push_back(std::move(next));
    }

    stack.final = stack.layers[0];
    for (int l = 1; l <= params.layers; ++l) {
        stack.final += stack.layers[static_cast<std::size_t>(l)];
    }
    stack.final /= static_cast<double>(params.layers + 1);
}

}  // namespace

ModelParams ModelParams::init(std::int32_t order, int d, int layers,
                              std::int32_t type_count, std::uint64_t seed) {
    if (order < 1 || d < 1 || layers < 1 || type_count < 1) {
        throw usage_error("model sizes must be positive");
    }
    ModelParams p;
    p.d = d;
    p.layers = layers;
    p.embeddings.resize(order, d);
    Rng rng(Rng::mix(seed, 0xe0b3dULL));
    for (std::int32_t v = 0; v < order; ++v) {
        for (int c = 0; c < d; ++c) p.embeddings(v, c) = 0.1 * rng.normal();
    }
    p.theta_raw.assign(static_cast<std::size_t>(layers), kThetaRawInit);
    p.phi.assign(static_cast<std::size_t>(layers), Eigen::VectorXd::Zero(type_count));
    return p;
}

std::vector<double> pair_score_cache(const SpectralBasis& basis, const SampleSet& set) {
    const auto order = static_cast<std::int32_t>(set.offsets.size()) - 1;
    if (basis.node_coords.rows() != order) {
        throw usage_error("spectral basis and sample set disagree on node count");
    }
    std::vector<double> scores(set.targets.size());
    parallel_for(order, [&](std::int64_t vi) {
        const auto v = static_cast<std::int32_t>(vi);
        const std::int64_t base = set.offsets[static_cast<std::size_t>(vi)];
        const std::int64_t count = set.size(v);
        for (std::int64_t j = 0; j < count; ++j) {
            const std::size_t at = static_cast<std::size_t>(base + j);
            scores[at] = basis.pair_score(v, set.targets[at]);
        }
    });
    return scores;
}

EmbeddingStack forward(const ModelParams& params, const SampleSet& set,
                       const std::vector<double>& pair_scores) {
    EmbeddingStack stack;
    run_forward(params, set, pair_scores, stack, nullptr);
    return stack;
}

ForwardCache forward_cached(const ModelParams& params, const SampleSet& set,
                            const std::vector<double>& pair_scores) {
    ForwardCache cache;
    run_forward(params, set, pair_scores, cache.stack, &cache);
    return cache;
}

}  // namespace sigf
