#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cascan/dynamics.hpp"
#include "cascan/rule.hpp"

namespace cascan {

enum class CertClass { A, B, C };

inline std::string to_string(CertClass c) {
    switch (c) {
        case CertClass::A: return "A";
        case CertClass::B: return "B";
        case CertClass::C: return "C";
    }
    return "?";
}

inline CertClass cert_class_from_string(const std::string& s) {
    if (s == "A") return CertClass::A;
    if (s == "B") return CertClass::B;
    if (s == "C") return CertClass::C;
    throw domain_error("unknown certificate class: " + s);
}

// Class A: some composition of the rule is zero-forcing at two nearby
// positions, so a single 0 swallows the whole ring.
struct ClassAParams {
    ForcingDecomposition forcing;
};

// Class B: adjacent 00 pairs persist and widen to 000, everything that is not
// all-ones or alternating acquires a 00, so those rings are the only
// survivors.
struct ClassBParams {
    int preserve_steps = 0;  // steps after which a 00 still implies a 00
    int preserve_at = 0;     // 1-indexed 00 position in the checked blocks
    int create_steps = 0;    // steps after which 1101/1011 implies a 00
    int create_at = 0;
    int stabilize_steps = 0; // max(preserve_steps, create_steps)
    int grow_steps = 0;      // steps after which a 00 implies a 000
    int grow_at = 0;
};

// Class C: like B one level up: 000 widens to 0000, and the failing-block
// graph shows every ring outside the exceptional families develops a 000.
struct ClassCParams {
    int clear_steps = 0;     // steps after which non-exceptional rings show 000
    int grow_steps = 0;      // steps after which a 000 implies a 0000
    int grow_at = 0;
};

struct Certificate {
    std::string rule;
    CertClass cls = CertClass::A;
    std::variant<ClassAParams, ClassBParams, ClassCParams> params;
    std::string stamp;
};

struct CertifyBounds {
    int a_max_steps = 5;
    int b_pair_max_steps = 5;
    int b_grow_max_steps = 5;
    int c_clear_max_steps = 9;
    int c_grow_max_steps = 5;
    uint64_t compose_table_bits = uint64_t{1} << 26;
};

namespace detail {

inline void require_radius2(const Rule& f, const char* what) {
    if (!(f.extents() == Extents{2, 2}))
        throw domain_error(std::string(what) + " requires a radius-2 rule");
}

// Every block of `len` cells carrying `pattern` (width hw, leftmost bit
// first) at 1-indexed position `at` must map under g to an all-zero output.
inline bool forced_output_zero(const Rule& g, int len, int at, uint64_t pattern, int hw) {
    int nb = g.neighborhood();
    int outw = len - nb + 1;
    int low_width = len - at - hw + 1;
    uint64_t lowmask = bit_mask(low_width);
    uint64_t wmask = bit_mask(nb);
    uint64_t free_count = uint64_t{1} << (len - hw);
    for (uint64_t u = 0; u < free_count; ++u) {
        uint64_t v = ((u >> low_width) << (low_width + hw)) | (pattern << low_width) | (u & lowmask);
        for (int k = 0; k < outw; ++k)
            if (g.table_bit((v >> (outw - 1 - k)) & wmask)) return false;
    }
    return true;
}

// Smallest (steps, position) such that blocks of length 2*steps*r + extra
// holding any of the given patterns map to all-zero output. Position ties
// break low.
struct StepWitness {
    int steps = 0;
    int at = 0;
};

inline std::optional<StepWitness> search_forced_zero(
    const Rule& f, int max_steps, int extra_cells, const std::vector<uint64_t>& patterns,
    int hw, uint64_t compose_budget) {
    for (int m = 1; m <= max_steps; ++m) {
        Rule g = compose(f, m, compose_budget);
        int len = g.neighborhood() - 1 + extra_cells; // extra_cells output bits
        for (int i = 1; i + hw - 1 <= len; ++i) {
            bool ok = true;
            for (uint64_t p : patterns) {
                if (!forced_output_zero(g, len, i, p, hw)) {
                    ok = false;
                    break;
                }
            }
            if (ok) return StepWitness{m, i};
        }
    }
    return std::nullopt;
}

} // namespace detail

// ---- class A ----

// Certificate search: smallest exponent whose composition is zero-forcing at
// an admissible pair and passes the homogeneous/alternating window tests.
// Pairs are tried in the same preference order as forcing_decomposition; the
// first pair whose side conditions hold wins.
inline std::optional<Certificate> certify_class_a(const Rule& f, const CertifyBounds& bounds = {}) {
    if (!f.extents().symmetric())
        throw domain_error("class A certification requires symmetric extents");
    int nb = f.neighborhood();
    if (f.table_bit(0) != 0 || f.table_bit(bit_mask(nb)) != 1) return std::nullopt;
    for (int m = 1; m <= bounds.a_max_steps; ++m) {
        Rule g = compose(f, m, bounds.compose_table_bits);
        auto pairs = detail::forcing_pairs(g);
        if (pairs.empty()) continue;
        if (!g.table_bit(bit_mask(g.neighborhood()))) continue;
        for (auto [a, b] : pairs) {
            auto d = detail::make_decomposition(g, m, a, b);
            if (d.alternating_image && *d.alternating_image != 0) continue;
            Certificate cert;
            cert.rule = rule_id(f);
            cert.cls = CertClass::A;
            cert.params = ClassAParams{d};
            return cert;
        }
    }
    return std::nullopt;
}

// ---- class B ----

struct PairInvariance {
    int preserve_steps = 0;
    int preserve_at = 0;
    int create_steps = 0;
    int create_at = 0;
};

// 00 persistence plus 00 creation out of 1101/1011, each with its own
// smallest exponent (checked over blocks giving two output cells).
inline std::optional<PairInvariance> find_zero_pair_invariance(
    const Rule& f, int max_steps, uint64_t compose_budget = uint64_t{1} << 26) {
    detail::require_radius2(f, "pair invariance check");
    auto preserve = detail::search_forced_zero(f, max_steps, 2, {0b00}, 2, compose_budget);
    if (!preserve) return std::nullopt;
    auto create = detail::search_forced_zero(f, max_steps, 2, {0b1101, 0b1011}, 4, compose_budget);
    if (!create) return std::nullopt;
    return PairInvariance{preserve->steps, preserve->at, create->steps, create->at};
}

struct GrowthWitness {
    int steps = 0;
    int at = 0;
};

// Every 00 widens to 000 (three output cells, displaced by a fixed offset).
inline std::optional<GrowthWitness> find_zero_pair_growth(
    const Rule& f, int max_steps, uint64_t compose_budget = uint64_t{1} << 26) {
    detail::require_radius2(f, "pair growth check");
    auto w = detail::search_forced_zero(f, max_steps, 3, {0b00}, 2, compose_budget);
    if (!w) return std::nullopt;
    return GrowthWitness{w->steps, w->at};
}

inline std::optional<Certificate> certify_class_b(const Rule& f, const CertifyBounds& bounds = {}) {
    detail::require_radius2(f, "class B certification");
    // fixed table entries: all-ones and both alternating windows map to 1,
    // the all-zero window maps to 0
    if (!f.table_bit(0b10101) || !f.table_bit(0b01010) || !f.table_bit(0b11111) ||
        f.table_bit(0b00000))
        return std::nullopt;
    auto inv = find_zero_pair_invariance(f, bounds.b_pair_max_steps, bounds.compose_table_bits);
    if (!inv) return std::nullopt;
    auto growth = find_zero_pair_growth(f, bounds.b_grow_max_steps, bounds.compose_table_bits);
    if (!growth) return std::nullopt;
    ClassBParams p;
    p.preserve_steps = inv->preserve_steps;
    p.preserve_at = inv->preserve_at;
    p.create_steps = inv->create_steps;
    p.create_at = inv->create_at;
    p.stabilize_steps = std::max(inv->preserve_steps, inv->create_steps);
    p.grow_steps = growth->steps;
    p.grow_at = growth->at;
    Certificate cert;
    cert.rule = rule_id(f);
    cert.cls = CertClass::B;
    cert.params = p;
    return cert;
}

// ---- class C ----

struct FailingGraphBudget {
    int dense_max_block_bits = 23;          // full-bitset analysis up to 2^23 blocks
    int enumerate_max_block_bits = 31;      // streaming collection beyond that
    uint64_t sparse_max_vertices = uint64_t{1} << 24;
    int probe_max_period = 16;              // small-period cycle probe
    uint64_t compose_table_bits = uint64_t{1} << 26;
    uint64_t explicit_graph_max_vertices = uint64_t{1} << 22;
};

namespace detail {

// Evaluator for the n-fold composition on packed windows of 4n+1 cells.
// Holds the full table when affordable, otherwise a two-stage split.
class ComposedWindowEval {
public:
    ComposedWindowEval(const Rule& f, int n, uint64_t table_budget) {
        nb_ = 4 * n + 1;
        if (nb_ <= 25) {
            table_.emplace(compose(f, n, table_budget));
        } else {
            int a = std::min(6, n - 1);
            lo_.emplace(compose(f, a, table_budget));
            hi_.emplace(compose(f, n - a, table_budget));
            nb_lo_ = lo_->neighborhood();
            nb_hi_ = hi_->neighborhood();
        }
    }

    int window_bits() const { return nb_; }

    bool operator()(uint64_t w) const {
        if (table_) return table_->table_bit(w);
        uint64_t mid = 0;
        uint64_t masklo = bit_mask(nb_lo_);
        for (int j = 0; j < nb_hi_; ++j)
            mid = (mid << 1) | (lo_->table_bit((w >> (nb_ - nb_lo_ - j)) & masklo) ? 1u : 0u);
        return hi_->table_bit(mid);
    }

private:
    std::optional<Rule> table_;
    std::optional<Rule> lo_, hi_;
    int nb_ = 0, nb_lo_ = 0, nb_hi_ = 0;
};

// A block of 4n+3 cells is failing when its three overlapping images under
// the n-fold composition are not 000.
inline bool failing_block(const ComposedWindowEval& ev, uint64_t block) {
    uint64_t wmask = bit_mask(ev.window_bits());
    return ev((block >> 2) & wmask) || ev((block >> 1) & wmask) || ev(block & wmask);
}

// The ring families that legitimately never develop 000: all-ones, the two
// alternating phases, and the four phases of the 1100 ring. Returned as
// sorted vertex sets of the (4n+3)-cell read windows.
inline std::vector<std::vector<uint64_t>> exceptional_vertex_sets(int B) {
    std::vector<std::vector<uint64_t>> out;
    out.push_back({bit_mask(B)});
    uint64_t a1 = 0;
    for (int i = 0; i < B; ++i) a1 = (a1 << 1) | static_cast<uint64_t>(i % 2 == 0);
    uint64_t a0 = ~a1 & bit_mask(B);
    std::vector<uint64_t> alt{a1, a0};
    std::sort(alt.begin(), alt.end());
    out.push_back(alt);
    static const int pat[4] = {1, 1, 0, 0};
    std::vector<uint64_t> quad;
    for (int p = 0; p < 4; ++p) {
        uint64_t v = 0;
        for (int i = 0; i < B; ++i) v = (v << 1) | static_cast<uint64_t>(pat[(p + i) % 4]);
        quad.push_back(v);
    }
    std::sort(quad.begin(), quad.end());
    out.push_back(quad);
    return out;
}

// Tarjan over the failing subgraph restricted to `verts` (sorted). Every
// strongly connected component containing a cycle must be exactly one of the
// exceptional families, carrying only its rotation cycle.
inline bool cycles_all_exceptional(const std::vector<uint64_t>& verts, int B) {
    const uint64_t mask = bit_mask(B);
    auto families = exceptional_vertex_sets(B);
    auto idx_of = [&](uint64_t v) -> int64_t {
        auto it = std::lower_bound(verts.begin(), verts.end(), v);
        if (it == verts.end() || *it != v) return -1;
        return it - verts.begin();
    };

    size_t n = verts.size();
    std::vector<int32_t> index(n, -1), low(n, 0);
    std::vector<uint8_t> onstk(n, 0);
    std::vector<int32_t> stk;
    struct Frame {
        int32_t v;
        int child;
    };
    std::vector<Frame> dfs;
    int32_t next = 0;

    auto component_ok = [&](std::vector<uint64_t>& comp) {
        bool cyclic = comp.size() > 1;
        if (comp.size() == 1) {
            uint64_t v = comp[0];
            cyclic = (((v << 1) | 0) & mask) == v || (((v << 1) | 1) & mask) == v;
        }
        if (!cyclic) return true;
        std::sort(comp.begin(), comp.end());
        bool known = false;
        for (const auto& fam : families)
            if (comp == fam) known = true;
        if (!known) return false;
        // the family set must carry exactly its rotation cycle
        for (uint64_t v : comp) {
            int inside = 0;
            for (int b = 0; b < 2; ++b) {
                uint64_t s = ((v << 1) | static_cast<uint64_t>(b)) & mask;
                if (std::binary_search(comp.begin(), comp.end(), s)) ++inside;
            }
            if (inside != 1) return false;
        }
        return true;
    };

    for (size_t r = 0; r < n; ++r) {
        if (index[r] != -1) continue;
        index[r] = low[r] = next++;
        stk.push_back(static_cast<int32_t>(r));
        onstk[r] = 1;
        dfs.push_back({static_cast<int32_t>(r), 0});
        while (!dfs.empty()) {
            Frame& fr = dfs.back();
            if (fr.child < 2) {
                int b = fr.child++;
                uint64_t s = ((verts[static_cast<size_t>(fr.v)] << 1) | static_cast<uint64_t>(b)) & mask;
                int64_t si = idx_of(s);
                if (si < 0) continue;
                if (index[static_cast<size_t>(si)] == -1) {
                    index[static_cast<size_t>(si)] = low[static_cast<size_t>(si)] = next++;
                    stk.push_back(static_cast<int32_t>(si));
                    onstk[static_cast<size_t>(si)] = 1;
                    dfs.push_back({static_cast<int32_t>(si), 0});
                } else if (onstk[static_cast<size_t>(si)]) {
                    low[static_cast<size_t>(fr.v)] =
                        std::min(low[static_cast<size_t>(fr.v)], index[static_cast<size_t>(si)]);
                }
            } else {
                int32_t v = fr.v;
                dfs.pop_back();
                if (!dfs.empty())
                    low[static_cast<size_t>(dfs.back().v)] =
                        std::min(low[static_cast<size_t>(dfs.back().v)], low[static_cast<size_t>(v)]);
                if (low[static_cast<size_t>(v)] == index[static_cast<size_t>(v)]) {
                    std::vector<uint64_t> comp;
                    while (true) {
                        int32_t w = stk.back();
                        stk.pop_back();
                        onstk[static_cast<size_t>(w)] = 0;
                        comp.push_back(verts[static_cast<size_t>(w)]);
                        if (w == v) break;
                    }
                    if (!component_ok(comp)) return false;
                }
            }
        }
    }
    return true;
}

// Quick disproof: a small-period ring whose windows are all failing is a
// cycle; if the ring is not one of the exceptional families we are done.
inline bool probe_finds_foreign_cycle(const ComposedWindowEval& ev, int B, int max_period) {
    for (int p = 1; p <= max_period; ++p) {
        uint64_t count = uint64_t{1} << p;
        for (uint64_t w = 0; w < count; ++w) {
            bool primitive = true;
            for (int d = 1; d < p && primitive; ++d) {
                if (p % d != 0) continue;
                uint64_t rot = ((w << d) | (w >> (p - d))) & bit_mask(p);
                if (rot == w) primitive = false;
            }
            if (!primitive) continue;
            bool exceptional =
                (p == 1 && w == 1) || (p == 2 && (w == 0b01 || w == 0b10)) ||
                (p == 4 && (w == 0b1100 || w == 0b1001 || w == 0b0011 || w == 0b0110));
            if (exceptional) continue;
            bool all_failing = true;
            for (int off = 0; off < p && all_failing; ++off) {
                uint64_t block = 0;
                for (int t = 0; t < B; ++t)
                    block = (block << 1) | ((w >> (p - 1 - (off + t) % p)) & 1);
                if (!failing_block(ev, block)) all_failing = false;
            }
            if (all_failing) return true;
        }
    }
    return false;
}

// Worklist removal of vertices without a failing successor or predecessor;
// what survives contains every cycle.
template <typename InSet, typename Erase, typename IndexOf>
inline void prune_to_core(std::vector<uint64_t>& order, int B, const InSet& in_set,
                          const Erase& erase, const IndexOf& index_of,
                          std::vector<uint8_t>& cnt) {
    const uint64_t mask = bit_mask(B);
    std::vector<uint32_t> work;
    auto degrees = [&](uint64_t v) -> uint8_t {
        uint8_t out = 0, in = 0;
        for (int b = 0; b < 2; ++b) {
            if (in_set(((v << 1) | static_cast<uint64_t>(b)) & mask)) ++out;
            if (in_set((v >> 1) | (static_cast<uint64_t>(b) << (B - 1)))) ++in;
        }
        return static_cast<uint8_t>(out | (in << 2));
    };
    for (size_t i = 0; i < order.size(); ++i) {
        cnt[i] = degrees(order[i]);
        if ((cnt[i] & 3) == 0 || (cnt[i] >> 2) == 0) work.push_back(static_cast<uint32_t>(i));
    }
    while (!work.empty()) {
        uint32_t i = work.back();
        work.pop_back();
        uint64_t v = order[i];
        if (!in_set(v)) continue;
        erase(v);
        for (int b = 0; b < 2; ++b) {
            uint64_t pre = (v >> 1) | (static_cast<uint64_t>(b) << (B - 1));
            if (in_set(pre)) {
                int64_t pi = index_of(pre);
                uint8_t& c = cnt[static_cast<size_t>(pi)];
                c = static_cast<uint8_t>(c - 1);
                if ((c & 3) == 0) work.push_back(static_cast<uint32_t>(pi));
            }
            uint64_t suc = ((v << 1) | static_cast<uint64_t>(b)) & mask;
            if (in_set(suc)) {
                int64_t si = index_of(suc);
                uint8_t& c = cnt[static_cast<size_t>(si)];
                c = static_cast<uint8_t>(c - 4);
                if ((c >> 2) == 0) work.push_back(static_cast<uint32_t>(si));
            }
        }
    }
}

inline bool only_exceptional_failing_cycles(const Rule& f, int n, const FailingGraphBudget& budget) {
    int B = 4 * n + 3;
    ComposedWindowEval ev(f, n, budget.compose_table_bits);

    if (B > budget.enumerate_max_block_bits) {
        if (probe_finds_foreign_cycle(ev, B, budget.probe_max_period)) return false;
        throw resource_error("failing-graph analysis at order " + std::to_string(n) +
                             " needs 2^" + std::to_string(B) +
                             " block enumeration, beyond the configured budget");
    }
    if (B >= 24 && probe_finds_foreign_cycle(ev, B, budget.probe_max_period)) return false;

    std::vector<uint64_t> core;
    if (B <= budget.dense_max_block_bits) {
        uint64_t total = uint64_t{1} << B;
        std::vector<uint64_t> fb(static_cast<size_t>((total + 63) / 64), 0);
        auto get = [&](uint64_t v) { return (fb[static_cast<size_t>(v >> 6)] >> (v & 63)) & 1; };
        uint64_t failing_count = 0;
        for (uint64_t v = 0; v < total; ++v) {
            if (failing_block(ev, v)) {
                fb[static_cast<size_t>(v >> 6)] |= uint64_t{1} << (v & 63);
                ++failing_count;
            }
        }
        if (failing_count == 0) return true;
        std::vector<uint64_t> order;
        order.reserve(static_cast<size_t>(failing_count));
        for (uint64_t v = 0; v < total; ++v)
            if (get(v)) order.push_back(v);
        std::vector<uint8_t> cnt(order.size(), 0);
        prune_to_core(
            order, B, [&](uint64_t v) { return get(v) != 0; },
            [&](uint64_t v) { fb[static_cast<size_t>(v >> 6)] &= ~(uint64_t{1} << (v & 63)); },
            [&](uint64_t v) {
                auto it = std::lower_bound(order.begin(), order.end(), v);
                return static_cast<int64_t>(it - order.begin());
            },
            cnt);
        for (uint64_t v : order)
            if (get(v)) core.push_back(v);
    } else {
        uint64_t total = uint64_t{1} << B;
        std::vector<uint64_t> verts;
        for (uint64_t v = 0; v < total; ++v) {
            if (failing_block(ev, v)) {
                if (verts.size() >= budget.sparse_max_vertices)
                    throw resource_error("failing-block set at order " + std::to_string(n) +
                                         " exceeds the configured vertex budget");
                verts.push_back(v);
            }
        }
        if (verts.empty()) return true;
        std::vector<uint8_t> alive(verts.size(), 1);
        auto index_of = [&](uint64_t v) -> int64_t {
            auto it = std::lower_bound(verts.begin(), verts.end(), v);
            if (it == verts.end() || *it != v) return -1;
            return it - verts.begin();
        };
        std::vector<uint8_t> cnt(verts.size(), 0);
        prune_to_core(
            verts, B,
            [&](uint64_t v) {
                int64_t i = index_of(v);
                return i >= 0 && alive[static_cast<size_t>(i)] != 0;
            },
            [&](uint64_t v) { alive[static_cast<size_t>(index_of(v))] = 0; },
            [&](uint64_t v) { return index_of(v); }, cnt);
        for (size_t i = 0; i < verts.size(); ++i)
            if (alive[i]) core.push_back(verts[i]);
    }

    if (core.empty()) return true;
    return cycles_all_exceptional(core, B);
}

} // namespace detail

// Explicit failing graph, for inspection and small orders.
struct FailingGraph {
    int order = 0;
    std::vector<uint64_t> vertices;                      // ascending
    std::vector<std::pair<uint64_t, uint64_t>> edges;    // overlap successors
};

inline FailingGraph build_failing_graph(const Rule& f, int order,
                                        const FailingGraphBudget& budget = {}) {
    detail::require_radius2(f, "failing graph construction");
    if (order < 1) throw domain_error("failing graph order must be >= 1");
    int B = 4 * order + 3;
    if (B > budget.dense_max_block_bits)
        throw resource_error("explicit failing graph at order " + std::to_string(order) +
                             " exceeds the block budget; use the cycle checker instead");
    detail::ComposedWindowEval ev(f, order, budget.compose_table_bits);
    FailingGraph g;
    g.order = order;
    uint64_t total = uint64_t{1} << B;
    for (uint64_t v = 0; v < total; ++v) {
        if (detail::failing_block(ev, v)) {
            if (g.vertices.size() >= budget.explicit_graph_max_vertices)
                throw resource_error("failing graph vertex budget exceeded");
            g.vertices.push_back(v);
        }
    }
    uint64_t mask = bit_mask(B);
    for (uint64_t v : g.vertices) {
        for (int b = 0; b < 2; ++b) {
            uint64_t s = ((v << 1) | static_cast<uint64_t>(b)) & mask;
            if (std::binary_search(g.vertices.begin(), g.vertices.end(), s))
                g.edges.emplace_back(v, s);
        }
    }
    return g;
}

// Smallest order at which every failing cycle is exceptional, i.e. every
// other ring shows 000 after that many steps.
inline std::optional<int> find_zero_triple_clearing(const Rule& f, int max_steps,
                                                    const FailingGraphBudget& budget = {}) {
    detail::require_radius2(f, "triple clearing check");
    for (int n = 1; n <= max_steps; ++n)
        if (detail::only_exceptional_failing_cycles(f, n, budget)) return n;
    return std::nullopt;
}

// Every 000 widens to 0000 (four output cells, displaced by a fixed offset).
inline std::optional<GrowthWitness> find_zero_triple_growth(
    const Rule& f, int max_steps, uint64_t compose_budget = uint64_t{1} << 26) {
    detail::require_radius2(f, "triple growth check");
    auto w = detail::search_forced_zero(f, max_steps, 4, {0b000}, 3, compose_budget);
    if (!w) return std::nullopt;
    return GrowthWitness{w->steps, w->at};
}

inline std::optional<Certificate> certify_class_c(const Rule& f, const CertifyBounds& bounds = {},
                                                  const FailingGraphBudget& fg = {}) {
    detail::require_radius2(f, "class C certification");
    // fixed table entries: the alternating and 1100-family windows feed the
    // two-stage collapse toward all-ones, everything homogeneous stays put
    if (!f.table_bit(0b01010) || !f.table_bit(0b10101) || !f.table_bit(0b11111) ||
        !f.table_bit(0b11001) || !f.table_bit(0b00110))
        return std::nullopt;
    if (f.table_bit(0b00000) || f.table_bit(0b01100) || f.table_bit(0b10011)) return std::nullopt;
    auto clearing = find_zero_triple_clearing(f, bounds.c_clear_max_steps, fg);
    if (!clearing) return std::nullopt;
    auto growth = find_zero_triple_growth(f, bounds.c_grow_max_steps, bounds.compose_table_bits);
    if (!growth) return std::nullopt;
    ClassCParams p;
    p.clear_steps = *clearing;
    p.grow_steps = growth->steps;
    p.grow_at = growth->at;
    Certificate cert;
    cert.rule = rule_id(f);
    cert.cls = CertClass::C;
    cert.params = p;
    return cert;
}

// ---- revalidation ----

// Re-run the checks with the stored parameters only (no search).
inline bool revalidate(const Rule& f, const Certificate& cert,
                       const CertifyBounds& bounds = {}, const FailingGraphBudget& fg = {}) {
    if (cert.rule != rule_id(f)) return false;
    switch (cert.cls) {
        case CertClass::A: {
            const auto* p = std::get_if<ClassAParams>(&cert.params);
            if (!p) return false;
            const auto& d = p->forcing;
            if (!f.extents().symmetric()) return false;
            int nb = f.neighborhood();
            if (f.table_bit(0) != 0 || f.table_bit(bit_mask(nb)) != 1) return false;
            if (d.steps < 1) return false;
            int dist = std::abs(d.pos_a - d.pos_b);
            if (dist != 1 && dist != 2) return false;
            Rule g = compose(f, d.steps, bounds.compose_table_bits);
            int gl = g.extents().left;
            int gnb = g.neighborhood();
            if (d.pos_a < -gl || d.pos_a > g.extents().right || d.pos_b < -gl ||
                d.pos_b > g.extents().right)
                return false;
            for (uint64_t v = 0; v < g.table_size(); ++v) {
                if (!g.table_bit(v)) continue;
                if (!Rule::window_bit(v, gnb, gl, d.pos_a) || !Rule::window_bit(v, gnb, gl, d.pos_b))
                    return false;
            }
            if (d.ones_image != (g.table_bit(bit_mask(gnb)) ? 1 : 0)) return false;
            if (d.ones_image != 1) return false;
            if (dist == 2) {
                if (!d.alternating_image) return false;
                int parity = ((d.pos_a % 2) + 2) % 2;
                int img = eval(g, alternating_window(g.extents(), parity));
                if (*d.alternating_image != img || img != 0) return false;
            } else if (d.alternating_image) {
                return false;
            }
            return true;
        }
        case CertClass::B: {
            const auto* p = std::get_if<ClassBParams>(&cert.params);
            if (!p) return false;
            if (!(f.extents() == Extents{2, 2})) return false;
            if (!f.table_bit(0b10101) || !f.table_bit(0b01010) || !f.table_bit(0b11111) ||
                f.table_bit(0b00000))
                return false;
            if (p->stabilize_steps != std::max(p->preserve_steps, p->create_steps)) return false;
            Rule gp = compose(f, p->preserve_steps, bounds.compose_table_bits);
            if (!detail::forced_output_zero(gp, 4 * p->preserve_steps + 2, p->preserve_at, 0b00, 2))
                return false;
            Rule gc = compose(f, p->create_steps, bounds.compose_table_bits);
            if (!detail::forced_output_zero(gc, 4 * p->create_steps + 2, p->create_at, 0b1101, 4) ||
                !detail::forced_output_zero(gc, 4 * p->create_steps + 2, p->create_at, 0b1011, 4))
                return false;
            Rule gg = compose(f, p->grow_steps, bounds.compose_table_bits);
            return detail::forced_output_zero(gg, 4 * p->grow_steps + 3, p->grow_at, 0b00, 2);
        }
        case CertClass::C: {
            const auto* p = std::get_if<ClassCParams>(&cert.params);
            if (!p) return false;
            if (!(f.extents() == Extents{2, 2})) return false;
            if (!f.table_bit(0b01010) || !f.table_bit(0b10101) || !f.table_bit(0b11111) ||
                !f.table_bit(0b11001) || !f.table_bit(0b00110))
                return false;
            if (f.table_bit(0b00000) || f.table_bit(0b01100) || f.table_bit(0b10011)) return false;
            if (!detail::only_exceptional_failing_cycles(f, p->clear_steps, fg)) return false;
            Rule gg = compose(f, p->grow_steps, bounds.compose_table_bits);
            return detail::forced_output_zero(gg, 4 * p->grow_steps + 4, p->grow_at, 0b000, 3);
        }
    }
    return false;
}

// ---- serialization ----

inline nlohmann::json certificate_to_json(const Certificate& c) {
    nlohmann::json j;
    j["rule"] = c.rule;
    j["class"] = to_string(c.cls);
    nlohmann::json p;
    switch (c.cls) {
        case CertClass::A: {
            const auto& a = std::get<ClassAParams>(c.params).forcing;
            p["steps"] = a.steps;
            p["zero_forcing_at"] = {a.pos_a, a.pos_b};
            p["all_ones_image"] = a.ones_image;
            if (a.alternating_image)
                p["alternating_image"] = *a.alternating_image;
            else
                p["alternating_image"] = nullptr;
            break;
        }
        case CertClass::B: {
            const auto& b = std::get<ClassBParams>(c.params);
            p["preserve_steps"] = b.preserve_steps;
            p["preserve_at"] = b.preserve_at;
            p["create_steps"] = b.create_steps;
            p["create_at"] = b.create_at;
            p["stabilize_steps"] = b.stabilize_steps;
            p["grow_steps"] = b.grow_steps;
            p["grow_at"] = b.grow_at;
            break;
        }
        case CertClass::C: {
            const auto& cc = std::get<ClassCParams>(c.params);
            p["clear_steps"] = cc.clear_steps;
            p["grow_steps"] = cc.grow_steps;
            p["grow_at"] = cc.grow_at;
            break;
        }
    }
    j["params"] = p;
    j["stamp"] = c.stamp;
    return j;
}

inline Certificate certificate_from_json(const nlohmann::json& j) {
    Certificate c;
    try {
        c.rule = j.at("rule").get<std::string>();
        c.cls = cert_class_from_string(j.at("class").get<std::string>());
        const auto& p = j.at("params");
        switch (c.cls) {
            case CertClass::A: {
                ForcingDecomposition d;
                d.steps = p.at("steps").get<int>();
                d.pos_a = p.at("zero_forcing_at").at(0).get<int>();
                d.pos_b = p.at("zero_forcing_at").at(1).get<int>();
                d.ones_image = p.at("all_ones_image").get<int>();
                if (!p.at("alternating_image").is_null())
                    d.alternating_image = p.at("alternating_image").get<int>();
                c.params = ClassAParams{d};
                break;
            }
            case CertClass::B: {
                ClassBParams b;
                b.preserve_steps = p.at("preserve_steps").get<int>();
                b.preserve_at = p.at("preserve_at").get<int>();
                b.create_steps = p.at("create_steps").get<int>();
                b.create_at = p.at("create_at").get<int>();
                b.stabilize_steps = p.at("stabilize_steps").get<int>();
                b.grow_steps = p.at("grow_steps").get<int>();
                b.grow_at = p.at("grow_at").get<int>();
                c.params = b;
                break;
            }
            case CertClass::C: {
                ClassCParams cc;
                cc.clear_steps = p.at("clear_steps").get<int>();
                cc.grow_steps = p.at("grow_steps").get<int>();
                cc.grow_at = p.at("grow_at").get<int>();
                c.params = cc;
                break;
            }
        }
        if (j.contains("stamp")) c.stamp = j.at("stamp").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw domain_error(std::string("malformed certificate record: ") + e.what());
    }
    return c;
}

} // namespace cascan
