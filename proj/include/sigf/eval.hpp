#pragma once

#include <cstdint>
#include <vector>

#include "sigf/interactions.hpp"
#include "sigf/linalg.hpp"

namespace sigf {

enum class EvalTarget { Validation, Test };

struct MetricReport {
    double recall = 0.0;
    double ndcg = 0.0;
    std::int64_t users = 0;  // users with at least one relevant item
};

// Top-k items for one user by predicted score, score descending with ties
// broken by ascending item index. excluded_items is either empty or an
// m-sized mask of items to leave out of the candidate pool. Returns item
// indices, not node ids.
std::vector<std::int32_t> rank_items(const RowMat& final_embeddings, std::int32_t n,
                                     std::int32_t m, std::int32_t user, int k,
                                     const std::vector<char>& excluded_items);

// relevant_sorted must be ascending; ranked is a top-k list.
double recall_at_k(const std::vector<std::int32_t>& ranked,
                   const std::vector<std::int32_t>& relevant_sorted, int k);
double ndcg_at_k(const std::vector<std::int32_t>& ranked,
                 const std::vector<std::int32_t>& relevant_sorted, int k);

// Mean recall/NDCG over users that have at least one positively signed
// interaction in the target split. Candidates exclude the user's training
// interactions, plus validation ones when scoring the test split; both
// signs are excluded, since any observed interaction is unavailable for
// recommendation.
MetricReport evaluate(const RowMat& final_embeddings, const DatasetSplit& split, int k,
                      EvalTarget target);

}  // namespace sigf
