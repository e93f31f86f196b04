#include "sigf/sampler.hpp"

#include <cstdint>
#include <utility>

#include "sigf/parallel.hpp"
#include "sigf/rng.hpp"

namespace sigf {

namespace {

struct WalkScratch {
    std::vector<std::int64_t> stamp;   // visited marker, keyed by walk clock
    std::int64_t clock = 0;
    std::vector<std::pair<std::int32_t, std::uint32_t>> starts;  // (neighbor, sign bit)
    std::vector<std::pair<std::int32_t, std::uint32_t>> cands;
};

void push_unvisited(const WalkScratch& s,
                    std::span<const std::int32_t> neighbors, std::uint32_t sign,
                    std::vector<std::pair<std::int32_t, std::uint32_t>>& cands) {
    for (std::int32_t w : neighbors) {
        if (s.stamp[static_cast<std::size_t>(w)] != s.clock) cands.emplace_back(w, sign);
    }
}

}  // namespace

SampleSet sample_neighborhoods(const SignedBipartiteGraph& graph, const PathTypeTable& table,
                               int max_walks, std::uint64_t seed) {
    if (max_walks < 0) throw usage_error("max_walks must be >= 0");
    const std::int32_t order = graph.order();
    const int max_len = table.max_length();

    std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> recorded(
        static_cast<std::size_t>(order));

    parallel_for(order, [&](std::int64_t vi) {
        const auto v = static_cast<std::int32_t>(vi);
        thread_local WalkScratch scratch;
        if (scratch.stamp.size() < static_cast<std::size_t>(order)) {
            scratch.stamp.assign(static_cast<std::size_t>(order), 0);
        }

        Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(v)));

        auto& starts = scratch.starts;
        starts.clear();
        for (std::int32_t w : graph.pos_neighbors(v)) starts.emplace_back(w, 0u);
        for (std::int32_t w : graph.neg_neighbors(v)) starts.emplace_back(w, 1u);
        if (starts.empty()) return;

        std::size_t walk_count = starts.size();
        if (max_walks > 0 && static_cast<std::size_t>(max_walks) < walk_count) {
            // Partial Fisher-Yates: the first max_walks slots become a
            // uniform sample of starting neighbors, in shuffled order.
            for (std::size_t i = 0; i < static_cast<std::size_t>(max_walks); ++i) {
                const std::size_t j =
                    i + rng.below(static_cast<std::uint32_t>(walk_count - i));
                std::swap(starts[i], starts[j]);
            }
            walk_count = static_cast<std::size_t>(max_walks);
        }

        auto& out = recorded[static_cast<std::size_t>(v)];
        for (std::size_t wi = 0; wi < walk_count; ++wi) {
            const auto [w0, sign0] = starts[wi];
            ++scratch.clock;
            scratch.stamp[static_cast<std::size_t>(v)] = scratch.clock;
            scratch.stamp[static_cast<std::size_t>(w0)] = scratch.clock;

            std::uint32_t bits = sign0;
            std::int32_t cur = w0;
            out.emplace_back(w0, table.id_from_bits(1, bits));

            for (int len = 2; len <= max_len; ++len) {
                auto& cands = scratch.cands;
                cands.clear();
                push_unvisited(scratch, graph.pos_neighbors(cur), 0u, cands);
                push_unvisited(scratch, graph.neg_neighbors(cur), 1u, cands);
                if (cands.empty()) break;
                const auto [nxt, sign] =
                    cands[rng.below(static_cast<std::uint32_t>(cands.size()))];
                scratch.stamp[static_cast<std::size_t>(nxt)] = scratch.clock;
                bits = (bits << 1) | sign;
                cur = nxt;
                out.emplace_back(nxt, table.id_from_bits(len, bits));
            }
        }
    });

    SampleSet set;
    set.seed = seed;
    set.offsets.resize(static_cast<std::size_t>(order) + 1);
    set.offsets[0] = 0;
    for (std::int32_t v = 0; v < order; ++v) {
        set.offsets[static_cast<std::size_t>(v) + 1] =
            set.offsets[static_cast<std::size_t>(v)] +
            static_cast<std::int64_t>(recorded[static_cast<std::size_t>(v)].size());
    }
    const std::int64_t total = set.offsets.back();
    set.targets.resize(static_cast<std::size_t>(total));
    set.types.resize(static_cast<std::size_t>(total));
    parallel_for(order, [&](std::int64_t vi) {
        const auto& rows = recorded[static_cast<std::size_t>(vi)];
        std::int64_t at = set.offsets[static_cast<std::size_t>(vi)];
        for (const auto& [w, t] : rows) {
            set.targets[static_cast<std::size_t>(at)] = w;
            set.types[static_cast<std::size_t>(at)] = t;
            ++at;
        }
    });
    return set;
}

}  // namespace sigf
