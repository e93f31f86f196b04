#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace sigf {

// One observed user-item feedback record. sign 1 = positive, 0 = negative;
// an absent pair is the only representation of "no interaction".
struct Interaction {
    std::int32_t user = 0;
    std::int32_t item = 0;
    std::int8_t sign = 0;
};

inline bool operator==(const Interaction& a, const Interaction& b) {
    return a.user == b.user && a.item == b.item && a.sign == b.sign;
}

// Predicate over the raw signal value, e.g. ">3.5" or "<=0.1".
struct SignalPredicate {
    enum class Op { Gt, Ge, Lt, Le, Eq, Ne };
    Op op = Op::Gt;
    double value = 0.0;

    bool matches(double signal) const;
    // Accepts ">v", ">=v", "<v", "<=v", "==v", "!=v".
    static SignalPredicate parse(const std::string& text);
};

// Classification rule for raw records: positive predicate is checked first,
// then the negative one; records matching neither are dropped.
struct ThresholdRule {
    SignalPredicate positive;
    SignalPredicate negative;

    // -1 = drop, otherwise the sign.
    int classify(double signal) const {
        if (positive.matches(signal)) return 1;
        if (negative.matches(signal)) return 0;
        return -1;
    }
};

struct RawRecord {
    std::string user_key;
    std::string item_key;
    double signal = 0.0;
};

struct IngestResult {
    std::vector<Interaction> interactions;
    std::vector<std::string> user_keys;  // index -> original key
    std::vector<std::string> item_keys;
    std::int64_t conflict_warnings = 0;  // duplicate pairs with opposing signs
};

// Reindexes keys to contiguous 0-based ids in order of first kept
// appearance. Duplicate (user, item) pairs collapse to the last occurrence;
// a sign conflict increments conflict_warnings. Throws data_error when no
// record survives the rule.
IngestResult ingest_raw(const std::vector<RawRecord>& records, const ThresholdRule& rule);

struct KcoreResult {
    std::vector<Interaction> interactions;
    std::int32_t n = 0;  // surviving users
    std::int32_t m = 0;  // surviving items
    // old index -> new index, -1 for removed entities
    std::vector<std::int32_t> user_remap;
    std::vector<std::int32_t> item_remap;
};

// Iteratively peels users/items whose total interaction count (both signs)
// is below k, then reindexes survivors preserving relative order. Throws
// data_error when the fixed point is empty.
KcoreResult kcore_filter(const std::vector<Interaction>& interactions,
                         std::int32_t n, std::int32_t m, int k);

struct DatasetSplit {
    std::vector<Interaction> train;
    std::vector<Interaction> validation;
    std::vector<Interaction> test;
    std::int32_t n = 0;
    std::int32_t m = 0;
};

// Uniform random permutation under the seed, cut at floor(r0*N) and
// floor((r0+r1)*N); the remainder is the test set.
DatasetSplit split_interactions(const std::vector<Interaction>& interactions,
                                std::int32_t n, std::int32_t m,
                                std::array<double, 3> ratios, std::uint64_t seed);

}  // namespace sigf
