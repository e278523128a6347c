#include <doctest.h>

#include <set>

#include "causeval/csv.hpp"
#include "causeval/rng.hpp"
#include "causeval/sha256.hpp"

using namespace causeval;

TEST_SUITE_BEGIN("util");

TEST_CASE("sha256 matches the published test vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("The quick brown fox jumps over the lazy dog") ==
          "d7a8fbb307d7809469ca9abcb0082e4f8d5651e46d3cdb762d02d0bf37c9e592");
    // two-block message (length 56 forces an extra padding block)
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("streams are deterministic and sub-streams are independent") {
    rng::Stream a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    rng::Stream base(7);
    rng::Stream d1 = base.derive("one");
    rng::Stream d2 = base.derive("two");
    CHECK(d1.next_u64() != d2.next_u64());

    // deriving never consumes parent state
    rng::Stream p(9);
    (void)p.derive(1);
    rng::Stream q(9);
    CHECK(p.next_u64() == q.next_u64());
}

TEST_CASE("below stays inside its bound and covers it") {
    rng::Stream stream(3);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        std::uint64_t v = stream.below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("bernoulli tracks its probability") {
    rng::Stream stream(11);
    int hits = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) hits += stream.bernoulli(0.3);
    const double rate = static_cast<double>(hits) / n;
    CHECK(rate > 0.28);
    CHECK(rate < 0.32);
}

TEST_CASE("csv escapes and reparses awkward fields") {
    std::vector<std::string> fields = {"plain", "with,comma", "with \"quotes\"",
                                       "multi\nline", ""};
    const std::string row = csv::join_row(fields);
    const auto parsed = csv::parse(row);
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0] == fields);
}

TEST_CASE("csv round-trips seeded random documents") {
    rng::Stream stream(1234);
    const std::string alphabet = "ab,\"\n\r x";
    for (int doc = 0; doc < 20; ++doc) {
        std::vector<std::vector<std::string>> rows;
        std::string text;
        const int n_rows = 1 + static_cast<int>(stream.below(5));
        for (int r = 0; r < n_rows; ++r) {
            std::vector<std::string> row;
            const int n_fields = 1 + static_cast<int>(stream.below(4));
            for (int f = 0; f < n_fields; ++f) {
                std::string field;
                const int len = static_cast<int>(stream.below(12));
                for (int i = 0; i < len; ++i)
                    field.push_back(alphabet[stream.below(alphabet.size())]);
                row.push_back(std::move(field));
            }
            text += csv::join_row(row);
            rows.push_back(std::move(row));
        }
        // any field holding a delimiter gets quoted, so the trip is exact
        const auto parsed = csv::parse(text);
        REQUIRE(parsed.size() == rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) CHECK(parsed[r] == rows[r]);
    }
}

TEST_SUITE_END();
