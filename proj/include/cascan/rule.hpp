#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cascan/bits.hpp"
#include "cascan/errors.hpp"

namespace cascan {

// Cells visible on each side of the updated cell. A radius-r neighbourhood has
// left = ceil(r) and right = floor(r), so half-integer radii are asymmetric.
struct Extents {
    int left = 0;
    int right = 0;

    int neighborhood() const { return left + right + 1; }
    bool symmetric() const { return left == right; }
    double radius() const { return (left + right) / 2.0; }

    static Extents from_radius(double r) {
        if (r < 0.0 || r * 2.0 != static_cast<double>(static_cast<long long>(r * 2.0)))
            throw domain_error("radius must be a nonnegative multiple of 1/2");
        auto twor = static_cast<long long>(r * 2.0);
        return Extents{static_cast<int>((twor + 1) / 2), static_cast<int>(twor / 2)};
    }

    bool operator==(const Extents&) const = default;
};

// A block of cells, one entry per cell, values 0/1, leftmost cell first.
using Block = std::vector<uint8_t>;

inline Block block_from_string(const std::string& s) {
    Block b;
    b.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') throw domain_error("block strings may contain only 0 and 1");
        b.push_back(static_cast<uint8_t>(c - '0'));
    }
    if (b.empty()) throw domain_error("block must have length >= 1");
    return b;
}

inline std::string block_to_string(const Block& b) {
    std::string s;
    s.reserve(b.size());
    for (uint8_t v : b) s.push_back(v ? '1' : '0');
    return s;
}

// Pack a block into an integer, leftmost cell in the most significant bit.
inline uint64_t block_bits(const Block& b) {
    if (b.size() > 64) throw domain_error("block too long to pack into 64 bits");
    uint64_t v = 0;
    for (uint8_t x : b) v = (v << 1) | (x & 1);
    return v;
}

inline Block block_from_bits(uint64_t v, int len) {
    Block b(static_cast<size_t>(len));
    for (int i = 0; i < len; ++i) b[static_cast<size_t>(i)] = static_cast<uint8_t>((v >> (len - 1 - i)) & 1);
    return b;
}

// A binary one-dimensional local rule, stored as its full truth table.
// Entry v holds f applied to the window whose cells, read left to right,
// spell v in binary (leftmost cell = most significant bit). With that
// convention the Wolfram number of a small rule is just the table itself.
class Rule {
public:
    // Tables are capped at 2^30 bits (128 MiB); composition enforces its own
    // configurable budget below this hard limit.
    static constexpr int kMaxNeighborhood = 30;

    explicit Rule(Extents e) : ext_(e) {
        if (e.left < 0 || e.right < 0) throw domain_error("extents must be nonnegative");
        if (e.neighborhood() > kMaxNeighborhood)
            throw resource_error("rule neighborhood exceeds the supported table size");
        bits_ = uint64_t{1} << e.neighborhood();
        words_.assign(static_cast<size_t>((bits_ + 63) / 64), 0);
    }

    const Extents& extents() const { return ext_; }
    int neighborhood() const { return ext_.neighborhood(); }
    uint64_t table_size() const { return bits_; }

    bool table_bit(uint64_t v) const {
        return (words_[static_cast<size_t>(v >> 6)] >> (v & 63)) & 1;
    }

    void set_table_bit(uint64_t v, bool on) {
        uint64_t& w = words_[static_cast<size_t>(v >> 6)];
        if (on)
            w |= uint64_t{1} << (v & 63);
        else
            w &= ~(uint64_t{1} << (v & 63));
    }

    const std::vector<uint64_t>& table_words() const { return words_; }

    // Value at a window offset, offsets run from -left .. +right, 0 = updated cell.
    static bool window_bit(uint64_t window, int nb, int left, int offset) {
        return (window >> (nb - 1 - (offset + left))) & 1;
    }

    uint64_t wolfram_number() const {
        if (bits_ > 64) throw domain_error("rule table exceeds 64 bits; no single Wolfram number");
        return words_[0] & bit_mask(static_cast<int>(bits_));
    }

    static Rule from_wolfram(uint64_t number, Extents e) {
        Rule r(e);
        if (r.bits_ < 64 && number >= (uint64_t{1} << r.bits_))
            throw domain_error("rule number out of range for the given extents");
        if (r.bits_ > 64) throw domain_error("extents too large to decode from a single number");
        r.words_[0] = number;
        return r;
    }

    bool operator==(const Rule& o) const { return ext_ == o.ext_ && words_ == o.words_; }

private:
    Extents ext_;
    uint64_t bits_ = 0;
    std::vector<uint64_t> words_;
};

inline int eval(const Rule& f, const Block& window) {
    if (static_cast<int>(window.size()) != f.neighborhood())
        throw domain_error("window length does not match the rule neighborhood");
    return f.table_bit(block_bits(window)) ? 1 : 0;
}

inline uint64_t wolfram_encode(const Rule& f) { return f.wolfram_number(); }

inline Rule wolfram_decode(uint64_t number, Extents e) { return Rule::from_wolfram(number, e); }

// Conjugation by cell complement: g(w) = 1 - f(~w).
inline Rule negate(const Rule& f) {
    Rule g(f.extents());
    uint64_t mask = bit_mask(f.neighborhood());
    for (uint64_t v = 0; v < f.table_size(); ++v)
        g.set_table_bit(v, !f.table_bit(~v & mask));
    return g;
}

// Conjugation by left-right mirror: g(w) = f(reverse(w)), extents swapped.
inline Rule reflect(const Rule& f) {
    Rule g(Extents{f.extents().right, f.extents().left});
    int nb = f.neighborhood();
    for (uint64_t v = 0; v < f.table_size(); ++v)
        g.set_table_bit(v, f.table_bit(reverse_bits(v, nb)));
    return g;
}

namespace detail {
inline bool table_less(const Rule& a, const Rule& b) {
    const auto& wa = a.table_words();
    const auto& wb = b.table_words();
    for (size_t i = wa.size(); i-- > 0;) {
        if (wa[i] != wb[i]) return wa[i] < wb[i];
    }
    return false;
}
} // namespace detail

// The four dynamically equivalent variants of a rule.
inline std::vector<Rule> symmetry_variants(const Rule& f) {
    std::vector<Rule> out;
    out.push_back(f);
    out.push_back(negate(f));
    out.push_back(reflect(f));
    out.push_back(negate(out[2]));
    return out;
}

// Smallest table among {f, negate, reflect, negate.reflect}. Reflection must
// stay in the same rule space, hence the symmetric-extents requirement.
inline Rule canonicalize(const Rule& f) {
    if (!f.extents().symmetric())
        throw domain_error("canonicalize requires symmetric extents");
    auto vars = symmetry_variants(f);
    const Rule* best = &vars[0];
    for (const auto& v : vars)
        if (detail::table_less(v, *best)) best = &v;
    return *best;
}

namespace detail {

// Radius-2 tables fit one 32-bit word, and the symmetry variants are fixed
// bit permutations of it. Byte tables make the canonical test cheap enough
// for full-space enumeration.
struct Radius2SymmetryTables {
    // reflected[b] spreads byte b to the positions rev5 maps it to; the four
    // byte results OR together into the reflected table
    uint32_t reflected[4][256];
    uint32_t reversed[4][256]; // plain 32-bit bit reversal, for negation

    Radius2SymmetryTables() {
        for (int chunk = 0; chunk < 4; ++chunk) {
            for (int b = 0; b < 256; ++b) {
                uint32_t refl = 0, rev = 0;
                for (int i = 0; i < 8; ++i) {
                    if (!((b >> i) & 1)) continue;
                    int v = chunk * 8 + i;
                    refl |= uint32_t{1} << reverse_bits(static_cast<uint64_t>(v), 5);
                    rev |= uint32_t{1} << (31 - v);
                }
                reflected[chunk][b] = refl;
                reversed[chunk][b] = rev;
            }
        }
    }
};

inline uint32_t reflect_u32(uint32_t t) {
    static const Radius2SymmetryTables tbl;
    return tbl.reflected[0][t & 0xff] | tbl.reflected[1][(t >> 8) & 0xff] |
           tbl.reflected[2][(t >> 16) & 0xff] | tbl.reflected[3][t >> 24];
}

inline uint32_t negate_u32(uint32_t t) {
    static const Radius2SymmetryTables tbl;
    uint32_t rev = tbl.reversed[0][t & 0xff] | tbl.reversed[1][(t >> 8) & 0xff] |
                   tbl.reversed[2][(t >> 16) & 0xff] | tbl.reversed[3][t >> 24];
    return ~rev;
}

inline bool is_canonical_u32(uint32_t t) {
    uint32_t r = reflect_u32(t);
    if (r < t) return false;
    uint32_t n = negate_u32(t);
    if (n < t) return false;
    return negate_u32(r) >= t;
}

} // namespace detail

inline bool is_canonical(const Rule& f) {
    if (f.extents() == Extents{2, 2})
        return detail::is_canonical_u32(static_cast<uint32_t>(f.table_words()[0]));
    auto vars = symmetry_variants(f);
    for (size_t i = 1; i < vars.size(); ++i)
        if (detail::table_less(vars[i], vars[0])) return false;
    return true;
}

// m synchronous steps collapsed into one radius-(m*r) rule.
// Built level by level: level k applies the level-(k-1) table across the
// window and feeds the resulting base-width word back into f.
inline Rule compose(const Rule& f, int m, uint64_t max_table_bits = uint64_t{1} << 26) {
    if (m < 1) throw domain_error("composition exponent must be >= 1");
    Extents target{f.extents().left * m, f.extents().right * m};
    if (target.neighborhood() > Rule::kMaxNeighborhood ||
        (uint64_t{1} << target.neighborhood()) > max_table_bits)
        throw resource_error("composed rule table would exceed the configured bound");

    Rule g = f;
    int nb1 = f.neighborhood();
    for (int k = 2; k <= m; ++k) {
        Extents ek{f.extents().left * k, f.extents().right * k};
        Rule next(ek);
        int nbk = ek.neighborhood();
        int nbg = g.neighborhood();
        uint64_t maskg = bit_mask(nbg);
        for (uint64_t v = 0; v < next.table_size(); ++v) {
            uint64_t img = 0;
            for (int j = 0; j < nb1; ++j)
                img = (img << 1) | (g.table_bit((v >> (nbk - nbg - j)) & maskg) ? 1u : 0u);
            next.set_table_bit(v, f.table_bit(img));
        }
        g = std::move(next);
    }
    return g;
}

// Slide the rule across a block; output shrinks by neighborhood-1 cells.
inline Block extend_to_block(const Rule& f, const Block& b) {
    int nb = f.neighborhood();
    if (static_cast<int>(b.size()) < nb)
        throw domain_error("block shorter than the rule neighborhood");
    Block out(b.size() - static_cast<size_t>(nb) + 1);
    uint64_t v = 0;
    uint64_t mask = bit_mask(nb);
    for (size_t i = 0; i + 1 < static_cast<size_t>(nb); ++i) v = (v << 1) | b[i];
    for (size_t j = 0; j < out.size(); ++j) {
        v = ((v << 1) | b[j + static_cast<size_t>(nb) - 1]) & mask;
        out[j] = f.table_bit(v) ? 1 : 0;
    }
    return out;
}

// Same, on a packed word. `len` input bits -> len - (neighborhood-1) bits.
inline uint64_t extend_bits(const Rule& f, uint64_t block, int len) {
    int nb = f.neighborhood();
    if (len < nb || len > 64) throw domain_error("packed block length out of range");
    int outlen = len - nb + 1;
    uint64_t mask = bit_mask(nb);
    uint64_t out = 0;
    for (int j = 0; j < outlen; ++j)
        out = (out << 1) | (f.table_bit((block >> (len - nb - j)) & mask) ? 1u : 0u);
    return out;
}

// The window that alternates 0 and 1 across the whole neighborhood.
// parity 0 puts 1s on even offsets (so the updated cell reads 1);
// parity 1 puts 1s on odd offsets.
inline Block alternating_window(Extents e, int parity = 0) {
    Block b(static_cast<size_t>(e.neighborhood()));
    for (int p = -e.left; p <= e.right; ++p)
        b[static_cast<size_t>(p + e.left)] = static_cast<uint8_t>(((p % 2) + 2) % 2 == parity ? 1 : 0);
    return b;
}

// A rule (or a composition of one) is zero-forcing at positions (a, b) when
// every window holding a 0 at either position maps to 0. Equivalently every
// window that maps to 1 carries 1s at both positions.
struct ForcingDecomposition {
    int steps = 1;   // composition exponent
    int pos_a = 0;   // window offsets, pos_a != pos_b, |pos_a - pos_b| in {1, 2}
    int pos_b = 0;
    int ones_image = 0;                     // composed rule applied to the all-ones window
    std::optional<int> alternating_image;   // set for distance-2 pairs: composed rule
                                            // on the alternating window whose 1s sit on
                                            // the parity of the forcing positions
};

namespace detail {

// Offsets p such that a 0 at p forces output 0: the AND of all 1-windows.
inline std::vector<int> forced_positions(const Rule& g) {
    int nb = g.neighborhood();
    uint64_t acc = bit_mask(nb);
    bool any_one = false;
    for (uint64_t v = 0; v < g.table_size() && acc != 0; ++v) {
        if (g.table_bit(v)) {
            acc &= v;
            any_one = true;
        }
    }
    if (!any_one) acc = bit_mask(nb); // constant-0 rule: every position forces
    std::vector<int> out;
    int left = g.extents().left;
    for (int p = -left; p <= g.extents().right; ++p)
        if ((acc >> (nb - 1 - (p + left))) & 1) out.push_back(p);
    return out;
}

// Admissible pairs in deterministic preference order:
// (0,1), (0,-1), (0,2), (0,-2), then adjacent pairs by ascending j, then
// distance-2 pairs by ascending j.
inline std::vector<std::pair<int, int>> forcing_pairs(const Rule& g) {
    auto pos = forced_positions(g);
    auto has = [&](int p) { return std::find(pos.begin(), pos.end(), p) != pos.end(); };
    int lo = -g.extents().left, hi = g.extents().right;
    std::vector<std::pair<int, int>> out;
    auto add = [&](int a, int b) {
        if (a < lo || a > hi || b < lo || b > hi) return;
        if (!has(a) || !has(b)) return;
        for (auto& q : out)
            if ((q.first == a && q.second == b) || (q.first == b && q.second == a)) return;
        out.emplace_back(a, b);
    };
    add(0, 1);
    add(0, -1);
    add(0, 2);
    add(0, -2);
    for (int j = lo; j + 1 <= hi; ++j) add(j, j + 1);
    for (int j = lo; j + 2 <= hi; ++j) add(j, j + 2);
    return out;
}

inline ForcingDecomposition make_decomposition(const Rule& g, int m, int a, int b) {
    ForcingDecomposition d;
    d.steps = m;
    d.pos_a = a;
    d.pos_b = b;
    d.ones_image = g.table_bit(bit_mask(g.neighborhood())) ? 1 : 0;
    if (std::abs(a - b) == 2) {
        int parity = ((a % 2) + 2) % 2;
        d.alternating_image = eval(g, alternating_window(g.extents(), parity));
    }
    return d;
}

} // namespace detail

// Smallest exponent m <= max_steps at which the composed rule is zero-forcing
// at some admissible pair; the pair is chosen by the preference order above.
inline std::optional<ForcingDecomposition> forcing_decomposition(
    const Rule& f, int max_steps, uint64_t max_table_bits = uint64_t{1} << 26) {
    if (!f.extents().symmetric())
        throw domain_error("forcing decomposition requires symmetric extents");
    if (max_steps < 1) throw domain_error("max_steps must be >= 1");
    for (int m = 1; m <= max_steps; ++m) {
        Rule g = compose(f, m, max_table_bits);
        auto pairs = detail::forcing_pairs(g);
        if (!pairs.empty())
            return detail::make_decomposition(g, m, pairs[0].first, pairs[0].second);
    }
    return std::nullopt;
}

// ---- rule identifiers ----
// Symmetric extents: "r<radius>:<number>", e.g. r2:3233857728 or r1.5:77.
// Anything else spells both extents: "r<left>,<right>:<number>".

inline std::string format_extents(Extents e) {
    if (e.left == e.right) return "r" + std::to_string(e.left);
    if (e.left == e.right + 1) {
        return "r" + std::to_string(e.right) + ".5";
    }
    return "r" + std::to_string(e.left) + "," + std::to_string(e.right);
}

inline std::string rule_id(const Rule& f) {
    return format_extents(f.extents()) + ":" + std::to_string(f.wolfram_number());
}

inline Extents parse_extents(const std::string& tok) {
    if (tok.empty() || tok[0] != 'r') throw domain_error("rule id must start with 'r': " + tok);
    std::string body = tok.substr(1);
    auto comma = body.find(',');
    if (comma != std::string::npos) {
        return Extents{static_cast<int>(parse_u64(body.substr(0, comma))),
                       static_cast<int>(parse_u64(body.substr(comma + 1)))};
    }
    auto dot = body.find('.');
    if (dot != std::string::npos) {
        if (body.substr(dot) != ".5") throw domain_error("only .5 radii are supported: " + tok);
        int fl = static_cast<int>(parse_u64(body.substr(0, dot)));
        return Extents{fl + 1, fl};
    }
    int r = static_cast<int>(parse_u64(body));
    return Extents{r, r};
}

inline Rule parse_rule_id(const std::string& id) {
    auto colon = id.find(':');
    if (colon == std::string::npos) throw domain_error("rule id must look like r<radius>:<number>");
    Extents e = parse_extents(id.substr(0, colon));
    return Rule::from_wolfram(parse_u64(id.substr(colon + 1)), e);
}

// Raw table export: bit v goes to byte v/8, bit v%8.
inline std::vector<uint8_t> table_to_bytes(const Rule& f) {
    std::vector<uint8_t> out(static_cast<size_t>((f.table_size() + 7) / 8), 0);
    for (uint64_t v = 0; v < f.table_size(); ++v)
        if (f.table_bit(v)) out[static_cast<size_t>(v >> 3)] |= static_cast<uint8_t>(1u << (v & 7));
    return out;
}

} // namespace cascan
