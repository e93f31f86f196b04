#include "sigf/interactions.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "sigf/errors.hpp"
#include "sigf/rng.hpp"

namespace sigf {

bool SignalPredicate::matches(double signal) const {
    switch (op) {
        case Op::Gt: return signal > value;
        case Op::Ge: return signal >= value;
        case Op::Lt: return signal < value;
        case Op::Le: return signal <= value;
        case Op::Eq: return signal == value;
        case Op::Ne: return signal != value;
    }
    return false;
}

SignalPredicate SignalPredicate::parse(const std::string& text) {
    auto fail = [&] { throw usage_error("cannot parse signal predicate '" + text + "'"); };
    SignalPredicate p;
    std::size_t at = 0;
    if (text.size() >= 2) {
        const std::string two = text.substr(0, 2);
        if (two == ">=") { p.op = Op::Ge; at = 2; }
        else if (two == "<=") { p.op = Op::Le; at = 2; }
        else if (two == "==") { p.op = Op::Eq; at = 2; }
        else if (two == "!=") { p.op = Op::Ne; at = 2; }
    }
    if (at == 0) {
        if (text.empty()) fail();
        if (text[0] == '>') { p.op = Op::Gt; at = 1; }
        else if (text[0] == '<') { p.op = Op::Lt; at = 1; }
        else fail();
    }
    std::size_t consumed = 0;
    try {
        p.value = std::stod(text.substr(at), &consumed);
    } catch (const std::exception&) {
        fail();
    }
    if (at + consumed != text.size()) fail();
    return p;
}

IngestResult ingest_raw(const std::vector<RawRecord>& records, const ThresholdRule& rule) {
    if (records.empty()) throw data_error("no input records");

    IngestResult out;
    std::unordered_map<std::string, std::int32_t> user_ids, item_ids;
    // pair key -> position in out.interactions
    std::unordered_map<std::int64_t, std::size_t> pair_pos;

    for (const RawRecord& rec : records) {
        const int sign = rule.classify(rec.signal);
        if (sign < 0) continue;

        auto [uit, unew] = user_ids.try_emplace(rec.user_key,
                                                static_cast<std::int32_t>(out.user_keys.size()));
        if (unew) out.user_keys.push_back(rec.user_key);
        auto [iit, inew] = item_ids.try_emplace(rec.item_key,
                                                static_cast<std::int32_t>(out.item_keys.size()));
        if (inew) out.item_keys.push_back(rec.item_key);

        const std::int32_t u = uit->second;
        const std::int32_t i = iit->second;
        const std::int64_t key = (static_cast<std::int64_t>(u) << 32) | static_cast<std::uint32_t>(i);
        auto [pit, fresh] = pair_pos.try_emplace(key, out.interactions.size());
        if (fresh) {
            out.interactions.push_back({u, i, static_cast<std::int8_t>(sign)});
        } else {
            // last writer wins
            Interaction& prev = out.interactions[pit->second];
            if (prev.sign != sign) ++out.conflict_warnings;
            prev.sign = static_cast<std::int8_t>(sign);
        }
    }

    if (out.interactions.empty())
        throw data_error("threshold rule dropped every record");
    return out;
}

KcoreResult kcore_filter(const std::vector<Interaction>& interactions,
                         std::int32_t n, std::int32_t m, int k) {
    if (k < 1) throw usage_error("k-core threshold must be >= 1");

    std::vector<std::int32_t> user_deg(n, 0), item_deg(m, 0);
    for (const Interaction& it : interactions) {
        ++user_deg[it.user];
        ++item_deg[it.item];
    }
    std::vector<char> user_alive(n, 1), item_alive(m, 1);

    // Queue-based peeling to the fixed point.
    std::vector<std::vector<std::int32_t>> by_user(n), by_item(m);
    for (std::size_t idx = 0; idx < interactions.size(); ++idx) {
        by_user[interactions[idx].user].push_back(static_cast<std::int32_t>(idx));
        by_item[interactions[idx].item].push_back(static_cast<std::int32_t>(idx));
    }

    std::vector<std::int32_t> queue;
    for (std::int32_t u = 0; u < n; ++u)
        if (user_deg[u] < k) { user_alive[u] = 0; queue.push_back(u); }
    for (std::int32_t i = 0; i < m; ++i)
        if (item_deg[i] < k) { item_alive[i] = 0; queue.push_back(n + i); }

    while (!queue.empty()) {
        const std::int32_t node = queue.back();
        queue.pop_back();
        const bool is_user = node < n;
        const auto& edges = is_user ? by_user[node] : by_item[node - n];
        for (std::int32_t e : edges) {
            const Interaction& it = interactions[static_cast<std::size_t>(e)];
            // decrement only a surviving endpoint; an edge is removed exactly
            // once, when its first endpoint dies
            if (is_user) {
                if (item_alive[it.item] && --item_deg[it.item] < k) {
                    item_alive[it.item] = 0;
                    queue.push_back(n + it.item);
                }
            } else {
                if (user_alive[it.user] && --user_deg[it.user] < k) {
                    user_alive[it.user] = 0;
                    queue.push_back(it.user);
                }
            }
        }
    }

    KcoreResult out;
    out.user_remap.assign(static_cast<std::size_t>(n), -1);
    out.item_remap.assign(static_cast<std::size_t>(m), -1);
    for (std::int32_t u = 0; u < n; ++u)
        if (user_alive[u]) out.user_remap[u] = out.n++;
    for (std::int32_t i = 0; i < m; ++i)
        if (item_alive[i]) out.item_remap[i] = out.m++;

    for (const Interaction& it : interactions) {
        if (user_alive[it.user] && item_alive[it.item])
            out.interactions.push_back({out.user_remap[it.user], out.item_remap[it.item], it.sign});
    }
    if (out.interactions.empty())
        throw data_error("k-core eliminated all data");
    return out;
}

DatasetSplit split_interactions(const std::vector<Interaction>& interactions,
                                std::int32_t n, std::int32_t m,
                                std::array<double, 3> ratios, std::uint64_t seed) {
    const double total = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(total - 1.0) > 1e-9)
        throw usage_error("split ratios must sum to 1");
    if (interactions.size() < 10)
        throw data_error("fewer than 10 interactions; split would be degenerate");

    std::vector<std::size_t> order(interactions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(Rng::mix(seed, 0x5b1177u));
    shuffle(order, rng);

    const auto count = static_cast<double>(interactions.size());
    const std::size_t n_train = static_cast<std::size_t>(std::floor(ratios[0] * count));
    const std::size_t n_val = static_cast<std::size_t>(std::floor(ratios[1] * count));

    DatasetSplit out;
    out.n = n;
    out.m = m;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const Interaction& it = interactions[order[pos]];
        if (pos < n_train) out.train.push_back(it);
        else if (pos < n_train + n_val) out.validation.push_back(it);
        else out.test.push_back(it);
    }
    return out;
}

}  // namespace sigf
