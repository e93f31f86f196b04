#include "sigf/graph.hpp"

#include <algorithm>

#include "sigf/errors.hpp"

namespace sigf {

namespace {

void pack_csr(const std::vector<std::pair<std::int32_t, std::int32_t>>& edges,
              std::int32_t order,
              std::vector<std::int64_t>& offsets,
              std::vector<std::int32_t>& targets) {
    offsets.assign(static_cast<std::size_t>(order) + 1, 0);
    for (const auto& [v, w] : edges) {
        ++offsets[static_cast<std::size_t>(v) + 1];
        ++offsets[static_cast<std::size_t>(w) + 1];
    }
    for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
    targets.resize(static_cast<std::size_t>(offsets.back()));
    std::vector<std::int64_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& [v, w] : edges) {
        targets[static_cast<std::size_t>(cursor[v]++)] = w;
        targets[static_cast<std::size_t>(cursor[w]++)] = v;
    }
    for (std::int32_t v = 0; v < order; ++v)
        std::sort(targets.begin() + offsets[v], targets.begin() + offsets[v + 1]);
}

}  // namespace

SignedBipartiteGraph SignedBipartiteGraph::build(std::span<const Interaction> train,
                                                 std::int32_t n, std::int32_t m) {
    SignedBipartiteGraph g;
    g.n_ = n;
    g.m_ = m;

    std::vector<std::pair<std::int32_t, std::int32_t>> pos, neg;
    pos.reserve(train.size());
    for (const Interaction& it : train) {
        if (it.user < 0 || it.user >= n || it.item < 0 || it.item >= m)
            throw data_error("interaction index out of range");
        const std::int32_t item_node = n + it.item;
        (it.sign ? pos : neg).emplace_back(it.user, item_node);
    }
    pack_csr(pos, g.order(), g.pos_offsets_, g.pos_targets_);
    pack_csr(neg, g.order(), g.neg_offsets_, g.neg_targets_);
    return g;
}

}  // namespace sigf
