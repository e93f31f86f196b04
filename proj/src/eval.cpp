#include "sigf/eval.hpp"

#include <algorithm>
#include <cmath>

#include "sigf/errors.hpp"
#include "sigf/parallel.hpp"

namespace sigf {

std::vector<std::int32_t> rank_items(const RowMat& final_embeddings, std::int32_t n,
                                     std::int32_t m, std::int32_t user, int k,
                                     const std::vector<char>& excluded_items) {
    if (k < 1) throw usage_error("k must be positive");
    if (final_embeddings.rows() != static_cast<std::int64_t>(n) + m) {
        throw usage_error("embedding table does not match n + m nodes");
    }
    if (user < 0 || user >= n) throw usage_error("user index out of range");
    if (!excluded_items.empty() && excluded_items.size() != static_cast<std::size_t>(m)) {
        throw usage_error("exclusion mask size does not match item count");
    }

    Eigen::VectorXd scores =
        final_embeddings.bottomRows(m) * final_embeddings.row(user).transpose();

    std::vector<std::int32_t> idx;
    idx.reserve(static_cast<std::size_t>(m));
    for (std::int32_t i = 0; i < m; ++i) {
        if (excluded_items.empty() || !excluded_items[static_cast<std::size_t>(i)]) {
            idx.push_back(i);
        }
    }
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(),
                      [&](std::int32_t a, std::int32_t b) {
                          const double sa = scores[a];
                          const double sb = scores[b];
                          if (sa != sb) return sa > sb;
                          return a < b;
                      });
    idx.resize(take);
    return idx;
}

namespace {

bool contains(const std::vector<std::int32_t>& sorted, std::int32_t x) {
    return std::binary_search(sorted.begin(), sorted.end(), x);
}

}  // namespace

double recall_at_k(const std::vector<std::int32_t>& ranked,
                   const std::vector<std::int32_t>& relevant_sorted, int k) {
    if (k < 1) throw usage_error("k must be positive");
    if (relevant_sorted.empty()) throw usage_error("recall needs a nonempty relevant set");
    std::int64_t hits = 0;
    const auto limit = std::min<std::size_t>(static_cast<std::size_t>(k), ranked.size());
    for (std::size_t p = 0; p < limit; ++p) {
        if (contains(relevant_sorted, ranked[p])) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(relevant_sorted.size());
}

double ndcg_at_k(const std::vector<std::int32_t>& ranked,
                 const std::vector<std::int32_t>& relevant_sorted, int k) {
    if (k < 1) throw usage_error("k must be positive");
    if (relevant_sorted.empty()) throw usage_error("ndcg needs a nonempty relevant set");
    double dcg = 0.0;
    const auto limit = std::min<std::size_t>(static_cast<std::size_t>(k), ranked.size());
    for (std::size_t p = 0; p < limit; ++p) {
        if (contains(relevant_sorted, ranked[p])) {
            dcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
        }
    }
    const auto ideal = std::min<std::size_t>(static_cast<std::size_t>(k),
                                             relevant_sorted.size());
    double idcg = 0.0;
    for (std::size_t p = 0; p < ideal; ++p) {
        idcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
    }
    return dcg / idcg;
}

MetricReport evaluate(const RowMat& final_embeddings, const DatasetSplit& split, int k,
                      EvalTarget target) {
    if (k < 1) throw usage_error("k must be positive");
    const std::int32_t n = split.n;
    const std::int32_t m = split.m;
    if (final_embeddings.rows() != static_cast<std::int64_t>(n) + m) {
        throw usage_error("embedding table does not match the dataset");
    }

    std::vector<std::vector<std::int32_t>> excluded(static_cast<std::size_t>(n));
    auto add_excluded = [&](const std::vector<Interaction>& rows) {
        for (const auto& r : rows) {
            excluded[static_cast<std::size_t>(r.user)].push_back(r.item);
        }
    };
    add_excluded(split.train);
    if (target == EvalTarget::Test) add_excluded(split.validation);

    const std::vector<Interaction>& rows =
        target == EvalTarget::Test ? split.test : split.validation;
    std::vector<std::vector<std::int32_t>> relevant(static_cast<std::size_t>(n));
    for (const auto& r : rows) {
        if (r.sign > 0) relevant[static_cast<std::size_t>(r.user)].push_back(r.item);
    }
    for (auto& rel : relevant) std::sort(rel.begin(), rel.end());

    std::vector<double> user_recall(static_cast<std::size_t>(n), 0.0);
    std::vector<double> user_ndcg(static_cast<std::size_t>(n), 0.0);
    std::vector<char> counted(static_cast<std::size_t>(n), 0);

    parallel_for(n, [&](std::int64_t ui) {
        const auto u = static_cast<std::int32_t>(ui);
        const auto& rel = relevant[static_cast<std::size_t>(u)];
        if (rel.empty()) return;
        thread_local std::vector<char> mask;
        mask.assign(static_cast<std::size_t>(m), 0);
        for (std::int32_t i : excluded[static_cast<std::size_t>(u)]) {
            mask[static_cast<std::size_t>(i)] = 1;
        }
        const auto ranked = rank_items(final_embeddings, n, m, u, k, mask);
        user_recall[static_cast<std::size_t>(u)] = recall_at_k(ranked, rel, k);
        user_ndcg[static_cast<std::size_t>(u)] = ndcg_at_k(ranked, rel, k);
        counted[static_cast<std::size_t>(u)] = 1;
    });

    MetricReport report;
    for (std::int32_t u = 0; u < n; ++u) {
        if (!counted[static_cast<std::size_t>(u)]) continue;
        report.recall += user_recall[static_cast<std::size_t>(u)];
        report.ndcg += user_ndcg[static_cast<std::size_t>(u)];
        ++report.users;
    }
    if (report.users == 0) {
        throw data_error("no users have relevant interactions in the requested split");
    }
    report.recall /= static_cast<double>(report.users);
    report.ndcg /= static_cast<double>(report.users);
    return report;
}

}  // namespace sigf
