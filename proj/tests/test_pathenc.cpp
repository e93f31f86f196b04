#include <doctest.h>

#include <set>
#include <string>

#include "sigf/errors.hpp"
#include "sigf/path_types.hpp"

using namespace sigf;

TEST_CASE("type counts for thresholds 1 through 6") {
    const int expected[] = {2, 6, 14, 30, 62, 126};
    for (int lp = 1; lp <= 6; ++lp) {
        CHECK(PathTypeTable(lp).type_count() == expected[lp - 1]);
    }
}

TEST_CASE("threshold bounds") {
    CHECK_NOTHROW(PathTypeTable(1));
    CHECK_NOTHROW(PathTypeTable(16));
    CHECK(PathTypeTable(16).type_count() == 2 * ((1 << 16) - 1));
    CHECK_THROWS_AS(PathTypeTable(0), usage_error);
    CHECK_THROWS_AS(PathTypeTable(17), usage_error);
    CHECK_THROWS_AS(PathTypeTable(-3), usage_error);
}

TEST_CASE("id layout for threshold 3") {
    const PathTypeTable t(3);
    CHECK(t.type_id("+") == 0);
    CHECK(t.type_id("-") == 1);
    CHECK(t.type_id("++") == 2);
    CHECK(t.type_id("+-") == 3);
    CHECK(t.type_id("-+") == 4);
    CHECK(t.type_id("--") == 5);
    CHECK(t.type_id("+++") == 6);
    CHECK(t.type_id("++-") == 7);
    CHECK(t.type_id("---") == 13);
    CHECK(t.signs_of(0) == "+");
    CHECK(t.signs_of(5) == "--");
    CHECK(t.signs_of(6) == "+++");
    CHECK(t.signs_of(13) == "---");
    CHECK(t.length_of(0) == 1);
    CHECK(t.length_of(5) == 2);
    CHECK(t.length_of(13) == 3);
}

TEST_CASE("encode and decode are inverse over every id") {
    const PathTypeTable t(8);
    std::set<std::string> seen;
    for (std::int32_t id = 0; id < t.type_count(); ++id) {
        const std::string signs = t.signs_of(id);
        CHECK(t.type_id(signs) == id);
        CHECK(static_cast<int>(signs.size()) == t.length_of(id));
        CHECK(seen.insert(signs).second);
    }
    CHECK(static_cast<std::int32_t>(seen.size()) == t.type_count());
}

TEST_CASE("ids are dense and ordered first by length") {
    const PathTypeTable t(5);
    for (int len = 1; len <= 5; ++len) {
        CHECK(PathTypeTable::block_offset(len) == (1 << len) - 2);
    }
    for (std::int32_t id = 1; id < t.type_count(); ++id) {
        CHECK(t.length_of(id) >= t.length_of(id - 1));
    }
}

TEST_CASE("incremental bit extension matches string encoding") {
    const PathTypeTable t(6);
    // Walk "+-+-" built edge by edge.
    std::uint32_t bits = 0;
    const std::string walk = "+-+-";
    for (int len = 1; len <= static_cast<int>(walk.size()); ++len) {
        bits = (bits << 1) | (walk[len - 1] == '-' ? 1u : 0u);
        CHECK(t.id_from_bits(len, bits) == t.type_id(walk.substr(0, len)));
    }
}

TEST_CASE("rejects bad sequences") {
    const PathTypeTable t(3);
    CHECK_THROWS_AS(t.type_id(""), usage_error);
    CHECK_THROWS_AS(t.type_id("++++"), usage_error);
    CHECK_THROWS_AS(t.type_id("+x"), usage_error);
    CHECK_THROWS_AS(t.signs_of(-1), usage_error);
    CHECK_THROWS_AS(t.signs_of(14), usage_error);
}
