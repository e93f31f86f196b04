#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sigf/interactions.hpp"

namespace sigf {

// Immutable signed bipartite graph over n users and m items. Node ids run
// 0..n-1 for users and n..n+m-1 for items; every edge crosses the
// bipartition and carries exactly one sign. Neighbor lists are CSR-packed
// and sorted ascending.
class SignedBipartiteGraph {
public:
    static SignedBipartiteGraph build(std::span<const Interaction> train,
                                      std::int32_t n, std::int32_t m);

    std::int32_t n() const { return n_; }
    std::int32_t m() const { return m_; }
    std::int32_t order() const { return n_ + m_; }

    std::span<const std::int32_t> pos_neighbors(std::int32_t v) const {
        return {pos_targets_.data() + pos_offsets_[v],
                static_cast<std::size_t>(pos_offsets_[v + 1] - pos_offsets_[v])};
    }
    std::span<const std::int32_t> neg_neighbors(std::int32_t v) const {
        return {neg_targets_.data() + neg_offsets_[v],
                static_cast<std::size_t>(neg_offsets_[v + 1] - neg_offsets_[v])};
    }

    std::int32_t pos_degree(std::int32_t v) const { return pos_offsets_[v + 1] - pos_offsets_[v]; }
    std::int32_t neg_degree(std::int32_t v) const { return neg_offsets_[v + 1] - neg_offsets_[v]; }
    std::int32_t degree(std::int32_t v) const { return pos_degree(v) + neg_degree(v); }

    std::int64_t pos_edge_count() const { return static_cast<std::int64_t>(pos_targets_.size()) / 2; }
    std::int64_t neg_edge_count() const { return static_cast<std::int64_t>(neg_targets_.size()) / 2; }

private:
    std::int32_t n_ = 0, m_ = 0;
    std::vector<std::int64_t> pos_offsets_, neg_offsets_;
    std::vector<std::int32_t> pos_targets_, neg_targets_;
};

}  // namespace sigf
