#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "cascan/rule.hpp"

using namespace cascan;

namespace {

Rule eca(uint64_t n) { return Rule::from_wolfram(n, Extents{1, 1}); }
Rule r2(uint64_t n) { return Rule::from_wolfram(n, Extents{2, 2}); }

// independent nested evaluation of m steps on a window of 2m*r+1 cells
int nested_eval(const Rule& f, int m, const Block& window) {
    Block cur = window;
    for (int k = 0; k < m; ++k) {
        Block next(cur.size() - static_cast<size_t>(f.neighborhood()) + 1);
        for (size_t j = 0; j < next.size(); ++j) {
            Block w(cur.begin() + static_cast<long>(j),
                    cur.begin() + static_cast<long>(j) + f.neighborhood());
            next[j] = static_cast<uint8_t>(eval(f, w));
        }
        cur = next;
    }
    REQUIRE(cur.size() == 1);
    return cur[0];
}

Rule random_r2(std::mt19937_64& rng) {
    return r2(rng() & 0xffffffffull);
}

} // namespace

TEST_CASE("window evaluation follows the table convention") {
    Rule parity = eca(150);
    CHECK(eval(parity, block_from_string("110")) == 0);
    CHECK(eval(parity, block_from_string("111")) == 1);
    CHECK(eval(parity, block_from_string("010")) == 1);

    Rule zero = r2(0);
    for (uint64_t v = 0; v < 32; ++v) CHECK(zero.table_bit(v) == false);

    // radius-2 rule that ANDs window cells 3 and 4 (1-indexed)
    Rule andrule(Extents{2, 2});
    for (uint64_t v = 0; v < 32; ++v)
        andrule.set_table_bit(v, ((v >> 2) & 1) && ((v >> 1) & 1));
    CHECK(eval(andrule, block_from_string("00110")) == 1);
    CHECK(eval(andrule, block_from_string("00100")) == 0);
    CHECK_THROWS_AS(eval(andrule, block_from_string("0011")), domain_error);
}

TEST_CASE("wolfram numbers round-trip and match direct sums") {
    // radius-1 parity rule has number 150
    Rule parity(Extents{1, 1});
    for (uint64_t v = 0; v < 8; ++v)
        parity.set_table_bit(v, std::popcount(v) % 2 == 1);
    CHECK(wolfram_encode(parity) == 150);

    CHECK(wolfram_encode(r2(0)) == 0);

    // independent oracle: sum 2^v over the windows with cells 3 and 4 set
    uint64_t expected = 0;
    for (uint64_t v = 0; v < 32; ++v)
        if (((v >> 2) & 1) && ((v >> 1) & 1)) expected += uint64_t{1} << v;
    CHECK(expected == 3233857728ull);
    Rule andrule(Extents{2, 2});
    for (uint64_t v = 0; v < 32; ++v)
        andrule.set_table_bit(v, ((v >> 2) & 1) && ((v >> 1) & 1));
    CHECK(wolfram_encode(andrule) == 3233857728ull);

    for (uint64_t n : {0ull, 1ull, 110ull, 150ull, 255ull})
        CHECK(wolfram_encode(wolfram_decode(n, Extents{1, 1})) == n);
    CHECK_THROWS_AS(wolfram_decode(256, Extents{1, 1}), domain_error);
}

TEST_CASE("negation and reflection act as table conjugations") {
    CHECK(wolfram_encode(reflect(eca(110))) == 124);
    CHECK(wolfram_encode(negate(eca(110))) == 137);
    CHECK(wolfram_encode(negate(eca(150))) == 150);

    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        Rule f = random_r2(rng);
        CHECK(negate(negate(f)) == f);
        CHECK(reflect(reflect(f)) == f);
        CHECK(negate(reflect(f)) == reflect(negate(f)));
    }
    for (uint64_t n = 0; n < 256; ++n) {
        Rule f = eca(n);
        CHECK(negate(negate(f)) == f);
        CHECK(reflect(reflect(f)) == f);
    }
}

TEST_CASE("canonical representative is the orbit minimum") {
    CHECK(wolfram_encode(canonicalize(eca(110))) == 110);
    CHECK(wolfram_encode(canonicalize(eca(124))) == 110);
    CHECK(wolfram_encode(canonicalize(eca(137))) == 110);
    CHECK(wolfram_encode(canonicalize(eca(193))) == 110);
    CHECK(wolfram_encode(canonicalize(eca(0))) == 0);

    // grouping all 256 elementary rules by orbit leaves 88 classes
    std::set<uint64_t> reps;
    for (uint64_t n = 0; n < 256; ++n) {
        Rule c = canonicalize(eca(n));
        CHECK(canonicalize(c) == c);
        reps.insert(wolfram_encode(c));
    }
    CHECK(reps.size() == 88);

    CHECK_THROWS_AS(canonicalize(Rule(Extents{2, 1})), domain_error);
}

TEST_CASE("the packed radius-2 canonical test matches the generic one") {
    auto generic = [](const Rule& f) {
        auto vars = symmetry_variants(f);
        uint64_t best = vars[0].wolfram_number();
        for (const auto& v : vars) best = std::min(best, v.wolfram_number());
        return best == f.wolfram_number();
    };
    std::mt19937_64 rng(17);
    for (int t = 0; t < 5000; ++t) {
        uint64_t n = rng() & 0xffffffffull;
        Rule f = r2(n);
        REQUIRE(is_canonical(f) == generic(f));
        CHECK(detail::reflect_u32(static_cast<uint32_t>(n)) == wolfram_encode(reflect(f)));
        CHECK(detail::negate_u32(static_cast<uint32_t>(n)) == wolfram_encode(negate(f)));
    }
}

TEST_CASE("composition equals nested application") {
    // identity rule composed three times still returns the centre cell
    Rule ident = eca(204);
    Rule ident3 = compose(ident, 3);
    CHECK(ident3.extents() == Extents{3, 3});
    for (uint64_t v = 0; v < 128; ++v)
        CHECK(ident3.table_bit(v) == ((v >> 3) & 1));

    for (uint64_t n : {110ull, 150ull, 30ull}) {
        Rule f = eca(n);
        for (int m : {1, 2, 3}) {
            Rule g = compose(f, m);
            for (uint64_t v = 0; v < g.table_size(); ++v) {
                Block w = block_from_bits(v, g.neighborhood());
                REQUIRE(static_cast<int>(g.table_bit(v)) == nested_eval(f, m, w));
            }
        }
    }

    // spec'd sample point: two parity steps on 11011
    Rule g = compose(eca(150), 2);
    CHECK(static_cast<int>(g.table_bit(block_bits(block_from_string("11011")))) ==
          nested_eval(eca(150), 2, block_from_string("11011")));

    CHECK(compose(eca(110), 1) == eca(110));
    CHECK_THROWS_AS(compose(r2(12345), 10), resource_error);

    // asymmetric extents compose the same way
    Rule half(Extents{1, 0});
    half.set_table_bit(0b01, true);
    half.set_table_bit(0b11, true);
    Rule half2 = compose(half, 2);
    CHECK(half2.extents() == Extents{2, 0});
    for (uint64_t v = 0; v < 8; ++v) {
        Block w = block_from_bits(v, 3);
        CHECK(static_cast<int>(half2.table_bit(v)) == nested_eval(half, 2, w));
    }
}

TEST_CASE("block extension slides the rule across a block") {
    CHECK(block_to_string(extend_to_block(eca(150), block_from_string("110100"))) == "0011");
    CHECK(block_to_string(extend_to_block(r2(0), block_from_string("0101010"))) == "000");
    CHECK(block_to_string(extend_to_block(eca(136), block_from_string("0000000"))) == "00000");
    CHECK_THROWS_AS(extend_to_block(eca(150), block_from_string("11")), domain_error);

    // packed variant agrees
    Block b = block_from_string("110100");
    uint64_t packed = extend_bits(eca(150), block_bits(b), 6);
    CHECK(packed == block_bits(block_from_string("0011")));
}

TEST_CASE("alternating windows match their closed forms") {
    // radius 2: (10)^{r/2} 1 (01)^{r/2}
    CHECK(block_to_string(alternating_window(Extents{2, 2})) == "10101");
    // radius 1 and 3 (odd): (01)^{(r-1)/2} 010 (10)^{(r-1)/2}
    CHECK(block_to_string(alternating_window(Extents{1, 1})) == "010");
    CHECK(block_to_string(alternating_window(Extents{3, 3})) == "0101010");
    // half-integer radii: ceil even -> (10)^{c/2} 10 (10)^{c/2-1}, ceil odd -> (01)^{(c-1)/2} 01 (01)^{(c-1)/2}
    CHECK(block_to_string(alternating_window(Extents{2, 1})) == "1010");
    CHECK(block_to_string(alternating_window(Extents{1, 0})) == "01");
    CHECK(block_to_string(alternating_window(Extents{3, 2})) == "010101");
    // complementary parity flips every cell
    CHECK(block_to_string(alternating_window(Extents{2, 2}, 1)) == "01010");
}

TEST_CASE("forcing decomposition finds the smallest forcing exponent") {
    // x0*x1: both positions adjacent at one step
    auto d = forcing_decomposition(eca(136), 3);
    REQUIRE(d.has_value());
    CHECK(d->steps == 1);
    CHECK(d->pos_a == 0);
    CHECK(d->pos_b == 1);
    CHECK(d->ones_image == 1);
    CHECK_FALSE(d->alternating_image.has_value());

    // x_{-1}*x_{+1}: alternated pair, and the surviving alternating window
    // (101, ones on the forcing parity) maps to 1
    auto d160 = forcing_decomposition(eca(160), 3);
    REQUIRE(d160.has_value());
    CHECK(d160->steps == 1);
    CHECK(d160->pos_a == -1);
    CHECK(d160->pos_b == 1);
    REQUIRE(d160->alternating_image.has_value());
    CHECK(*d160->alternating_image == 1);
    CHECK(eval(eca(160), block_from_string("101")) == 1);

    CHECK_FALSE(forcing_decomposition(eca(204), 3).has_value());
    CHECK_THROWS_AS(forcing_decomposition(Rule(Extents{2, 1}), 3), domain_error);
}

TEST_CASE("a forcing decomposition really forces zeros") {
    std::mt19937_64 rng(11);
    int found = 0;
    for (int t = 0; t < 400 && found < 40; ++t) {
        // sparse tables admit forcing pairs far more often than dense ones
        Rule f = r2(rng() & rng() & rng() & 0xffffffffull);
        auto d = forcing_decomposition(f, 2);
        if (!d) continue;
        ++found;
        Rule g = compose(f, d->steps);
        int nb = g.neighborhood();
        int left = g.extents().left;
        for (uint64_t v = 0; v < g.table_size(); ++v) {
            bool za = !Rule::window_bit(v, nb, left, d->pos_a);
            bool zb = !Rule::window_bit(v, nb, left, d->pos_b);
            if (za || zb) REQUIRE(g.table_bit(v) == false);
        }
    }
    CHECK(found > 0);
}

TEST_CASE("rule ids round-trip") {
    CHECK(rule_id(eca(110)) == "r1:110");
    CHECK(rule_id(r2(3233857728ull)) == "r2:3233857728");
    CHECK(rule_id(Rule(Extents{2, 1})) == "r1.5:0");
    CHECK(parse_rule_id("r1:110") == eca(110));
    CHECK(parse_rule_id("r2:17") == r2(17));
    CHECK(parse_rule_id("r1.5:3").extents() == Extents{2, 1});
    CHECK(parse_rule_id("r2,0:5").extents() == Extents{2, 0});
    CHECK_THROWS_AS(parse_rule_id("110"), domain_error);
    CHECK_THROWS_AS(parse_rule_id("r2:zzz"), domain_error);
}

TEST_CASE("table bytes place bit v at byte v/8") {
    Rule f = eca(150);
    auto bytes = table_to_bytes(f);
    REQUIRE(bytes.size() == 1);
    CHECK(bytes[0] == 150);
    auto bytes2 = table_to_bytes(r2(3233857728ull));
    REQUIRE(bytes2.size() == 4);
    uint32_t packed = static_cast<uint32_t>(bytes2[0]) | (static_cast<uint32_t>(bytes2[1]) << 8) |
                      (static_cast<uint32_t>(bytes2[2]) << 16) |
                      (static_cast<uint32_t>(bytes2[3]) << 24);
    CHECK(packed == 3233857728u);
}
