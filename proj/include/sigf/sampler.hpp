#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sigf/graph.hpp"
#include "sigf/path_types.hpp"

namespace sigf {

// Sampled sign-aware neighborhoods, flattened over nodes. Entry j of node v
// lives at index offsets[v] + j and pairs the visited node with the path
// type of the sign sequence that reached it. A node can appear several
// times with the same or different types; attention treats each occurrence
// separately.
struct SampleSet {
    std::vector<std::int64_t> offsets;  // order + 1
    std::vector<std::int32_t> targets;
    std::vector<std::int32_t> types;
    std::uint64_t seed = 0;

    std::int64_t size(std::int32_t v) const {
        return offsets[static_cast<std::size_t>(v) + 1] - offsets[static_cast<std::size_t>(v)];
    }
    std::span<const std::int32_t> targets_of(std::int32_t v) const {
        return {targets.data() + offsets[static_cast<std::size_t>(v)],
                static_cast<std::size_t>(size(v))};
    }
    std::span<const std::int32_t> types_of(std::int32_t v) const {
        return {types.data() + offsets[static_cast<std::size_t>(v)],
                static_cast<std::size_t>(size(v))};
    }
};

// One random walk per starting neighbor of each node (or per a uniform
// subset of max_walks starting neighbors when max_walks > 0 caps them).
// A walk begins with the edge to its starting neighbor, keeps to nodes not
// yet visited on that walk, records every node it reaches together with
// the sign sequence walked so far, and stops after table.max_length()
// edges or at a dead end. Each node's walks draw from an RNG stream mixed
// from (seed, node), so results do not depend on thread count.
SampleSet sample_neighborhoods(const SignedBipartiteGraph& graph, const PathTypeTable& table,
                               int max_walks, std::uint64_t seed);

}  // namespace sigf
