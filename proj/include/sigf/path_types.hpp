#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "sigf/errors.hpp"

namespace sigf {

// Bijection between edge-sign sequences of length 1..Lp and dense integer
// ids. Layout: ids of length-l sequences occupy [offset(l), offset(l)+2^l)
// with offset(l) = 2^l - 2; within a block the signs form a binary number,
// '+' = 0 and '-' = 1, first edge in the most significant bit. Total count
// is 2*(2^Lp - 1). O(1) encode/decode, and a walk can extend an id
// incrementally: bits' = bits<<1 | sign.
class PathTypeTable {
public:
    static constexpr int kMaxLength = 16;

    explicit PathTypeTable(int max_length) : max_length_(max_length) {
        if (max_length < 1 || max_length > kMaxLength)
            throw usage_error("path length threshold must be in [1, 16], got " +
                              std::to_string(max_length));
        type_count_ = 2 * ((std::int32_t(1) << max_length) - 1);
    }

    int max_length() const { return max_length_; }
    std::int32_t type_count() const { return type_count_; }

    static std::int32_t block_offset(int length) {
        return (std::int32_t(1) << length) - 2;
    }

    std::int32_t id_from_bits(int length, std::uint32_t bits) const {
        return block_offset(length) + static_cast<std::int32_t>(bits);
    }

    std::int32_t type_id(std::string_view signs) const {
        const int len = static_cast<int>(signs.size());
        if (len < 1 || len > max_length_)
            throw usage_error("sign sequence length " + std::to_string(len) +
                              " outside [1, " + std::to_string(max_length_) + "]");
        std::uint32_t bits = 0;
        for (char c : signs) {
            if (c != '+' && c != '-')
                throw usage_error(std::string("invalid sign character '") + c + "'");
            bits = (bits << 1) | (c == '-' ? 1u : 0u);
        }
        return id_from_bits(len, bits);
    }

    std::string signs_of(std::int32_t id) const {
        if (id < 0 || id >= type_count_)
            throw usage_error("path type id " + std::to_string(id) + " out of range");
        int len = 1;
        while (block_offset(len + 1) <= id) ++len;
        const std::uint32_t bits = static_cast<std::uint32_t>(id - block_offset(len));
        std::string out(static_cast<std::size_t>(len), '+');
        for (int i = 0; i < len; ++i)
            if (bits >> (len - 1 - i) & 1u) out[static_cast<std::size_t>(i)] = '-';
        return out;
    }

    int length_of(std::int32_t id) const {
        if (id < 0 || id >= type_count_)
            throw usage_error("path type id " + std::to_string(id) + " out of range");
        int len = 1;
        while (block_offset(len + 1) <= id) ++len;
        return len;
    }

private:
    int max_length_;
    std::int32_t type_count_;
};

}  // namespace sigf
