#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cascan/rule.hpp"

namespace cascan {

// A cyclic configuration of `length` cells packed into one word,
// cell i at bit (length-1-i), so cell 0 is the most significant bit.
struct CyclicConfig {
    int length = 1;
    uint64_t bits = 0;

    int cell(int i) const {
        int j = ((i % length) + length) % length;
        return static_cast<int>((bits >> (length - 1 - j)) & 1);
    }

    bool operator==(const CyclicConfig&) const = default;
};

inline CyclicConfig config_from_string(const std::string& s) {
    Block b = block_from_string(s);
    if (b.size() > 63) throw domain_error("configuration too long (max 63 cells)");
    return CyclicConfig{static_cast<int>(b.size()), block_bits(b)};
}

inline std::string config_to_string(CyclicConfig c) {
    return block_to_string(block_from_bits(c.bits, c.length));
}

// Shift by k: cell j of the result is cell (j+k) of the input.
inline CyclicConfig rotate(CyclicConfig c, int k) {
    int L = c.length;
    k = ((k % L) + L) % L;
    if (k == 0) return c;
    uint64_t mask = bit_mask(L);
    return CyclicConfig{L, ((c.bits << k) | (c.bits >> (L - k))) & mask};
}

inline CyclicConfig complement(CyclicConfig c) {
    return CyclicConfig{c.length, ~c.bits & bit_mask(c.length)};
}

inline CyclicConfig reverse(CyclicConfig c) {
    return CyclicConfig{c.length, reverse_bits(c.bits, c.length)};
}

// One synchronous update. Windows wrap, and for L < neighborhood a cell may
// be read more than once within a single window.
inline CyclicConfig step(const Rule& f, CyclicConfig c) {
    int L = c.length;
    int left = f.extents().left;
    uint64_t out = 0;
    for (int i = 0; i < L; ++i) {
        uint64_t w = 0;
        for (int t = -left; t <= f.extents().right; ++t)
            w = (w << 1) | static_cast<uint64_t>(c.cell(i + t));
        out = (out << 1) | (f.table_bit(w) ? 1u : 0u);
    }
    return CyclicConfig{L, out};
}

struct DynamicsBudget {
    int max_length = 26; // exact state-space analysis allocates O(2^L) bytes
};

namespace detail {

// Per-length successor function with the window offsets precomputed.
class StepTable {
public:
    StepTable(const Rule& f, int L) : f_(&f), L_(L) {
        int left = f.extents().left;
        for (int t = -left; t <= f.extents().right; ++t) offsets_.push_back(t);
    }

    uint64_t operator()(uint64_t s) const {
        uint64_t out = 0;
        for (int i = 0; i < L_; ++i) {
            uint64_t w = 0;
            for (int t : offsets_) {
                int j = i + t;
                j %= L_;
                if (j < 0) j += L_;
                w = (w << 1) | ((s >> (L_ - 1 - j)) & 1);
            }
            out = (out << 1) | (f_->table_bit(w) ? 1u : 0u);
        }
        return out;
    }

private:
    const Rule* f_;
    int L_;
    std::vector<int> offsets_;
};

} // namespace detail

// Exact attractor cycles and basin sizes at one length, via iterative walks
// over the functional graph of the one-step map (no recursion, O(2^L) time).
// Attractors are sorted by their smallest member; each cycle is listed from
// that member in successor order. Basin sizes include the cycle itself.
struct AttractorReport {
    int length = 0;
    std::vector<std::vector<uint64_t>> attractors;
    std::vector<uint64_t> basin_sizes;
};

inline AttractorReport attractors(const Rule& f, int L, const DynamicsBudget& budget = {}) {
    if (L < 1) throw domain_error("length must be >= 1");
    if (L > budget.max_length || L > 62)
        throw resource_error("state space 2^" + std::to_string(L) + " exceeds the analysis budget");
    detail::StepTable succ(f, L);
    uint64_t n = uint64_t{1} << L;

    std::vector<int32_t> attr(n, -1); // attractor id, -2 marks "on current path"
    std::vector<std::vector<uint64_t>> cycles;
    std::vector<uint64_t> path;

    for (uint64_t s0 = 0; s0 < n; ++s0) {
        if (attr[s0] != -1) continue;
        path.clear();
        uint64_t s = s0;
        while (attr[s] == -1) {
            attr[s] = -2;
            path.push_back(s);
            s = succ(s);
        }
        int32_t id;
        if (attr[s] == -2) {
            // new cycle: the path suffix starting at s
            size_t start = path.size();
            while (start > 0 && path[start - 1] != s) --start;
            --start;
            id = static_cast<int32_t>(cycles.size());
            cycles.emplace_back(path.begin() + static_cast<long>(start), path.end());
        } else {
            id = attr[s];
        }
        for (uint64_t v : path) attr[v] = id;
    }

    // normalize: rotate each cycle to start at its minimum, sort by that minimum
    std::vector<size_t> order(cycles.size());
    for (size_t i = 0; i < cycles.size(); ++i) {
        auto& cyc = cycles[i];
        size_t mi = static_cast<size_t>(std::min_element(cyc.begin(), cyc.end()) - cyc.begin());
        std::rotate(cyc.begin(), cyc.begin() + static_cast<long>(mi), cyc.end());
        order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return cycles[a][0] < cycles[b][0]; });

    AttractorReport rep;
    rep.length = L;
    std::vector<int32_t> remap(cycles.size());
    for (size_t k = 0; k < order.size(); ++k) {
        remap[order[k]] = static_cast<int32_t>(k);
        rep.attractors.push_back(cycles[order[k]]);
    }
    rep.basin_sizes.assign(cycles.size(), 0);
    for (uint64_t s = 0; s < n; ++s) ++rep.basin_sizes[static_cast<size_t>(remap[static_cast<size_t>(attr[s])])];
    return rep;
}

// One length of the consensus analysis: are the homogeneous fixed points the
// only attractors, and how many states drain into the all-ones fixed point.
// `ones_basin` is meaningful only when `consensus` holds.
struct LengthAnalysis {
    bool consensus = false;
    uint64_t ones_basin = 0;
};

inline LengthAnalysis analyze_length(const Rule& f, int L, const DynamicsBudget& budget = {}) {
    if (L < 1) throw domain_error("length must be >= 1");
    if (L > budget.max_length || L > 62)
        throw resource_error("state space 2^" + std::to_string(L) + " exceeds the analysis budget");
    detail::StepTable succ(f, L);
    uint64_t n = uint64_t{1} << L;
    uint64_t ones = n - 1;

    if (succ(0) != 0 || succ(ones) != ones) return {false, 0};

    // walk classes: 1 drains to 0^L, 2 drains to 1^L, 3 reaches another cycle
    constexpr uint8_t kOnPath = 4;
    std::vector<uint8_t> mark(n, 0);
    std::vector<uint64_t> path;
    uint64_t ones_count = 0;

    for (uint64_t s0 = 0; s0 < n; ++s0) {
        if (mark[s0]) continue;
        path.clear();
        uint64_t s = s0;
        while (mark[s] == 0) {
            mark[s] = kOnPath;
            path.push_back(s);
            s = succ(s);
        }
        uint8_t cls;
        if (mark[s] == kOnPath) {
            // closed a new cycle; only the two homogeneous fixed points are allowed
            if (s == 0)
                cls = 1;
            else if (s == ones)
                cls = 2;
            else
                return {false, 0};
        } else {
            cls = mark[s];
        }
        for (uint64_t v : path) mark[v] = cls;
        if (cls == 2) ones_count += path.size();
    }
    return {true, ones_count};
}

// Number of states whose orbit reaches target^L (works for any rule).
inline uint64_t basin_count(const Rule& f, int L, int target, const DynamicsBudget& budget = {}) {
    if (L < 1) throw domain_error("length must be >= 1");
    if (L > budget.max_length || L > 62)
        throw resource_error("state space 2^" + std::to_string(L) + " exceeds the analysis budget");
    detail::StepTable succ(f, L);
    uint64_t n = uint64_t{1} << L;
    uint64_t goal = target ? n - 1 : 0;

    // 1 = reaches goal, 2 = does not, 3 = on current path.
    // Walks stop at the goal without pushing it, so it is never double
    // classified; it reaches itself in zero steps and is added at the end.
    std::vector<uint8_t> mark(n, 0);
    std::vector<uint64_t> path;
    uint64_t count = 0;
    for (uint64_t s0 = 0; s0 < n; ++s0) {
        if (mark[s0] || s0 == goal) continue;
        path.clear();
        uint64_t s = s0;
        uint8_t cls = 0;
        while (true) {
            if (s == goal) {
                cls = 1;
                break;
            }
            if (mark[s] == 1 || mark[s] == 2) {
                cls = mark[s];
                break;
            }
            if (mark[s] == 3) {
                cls = 2; // closed a cycle that never touched the goal
                break;
            }
            mark[s] = 3;
            path.push_back(s);
            s = succ(s);
        }
        for (uint64_t v : path) mark[v] = cls;
        if (cls == 1) count += path.size();
    }
    return count + 1;
}

// Counts of states draining to 1^L for lengths 5..20, the signature used to
// group candidate rules by the decision problem they appear to solve.
using PatternVector = std::array<uint64_t, 16>;
constexpr int kPatternFirstLength = 5;
constexpr int kPatternLastLength = 20;

inline std::string pattern_to_string(const std::vector<uint64_t>& p) {
    std::string s;
    for (size_t i = 0; i < p.size(); ++i) {
        if (i) s.push_back(';');
        s += std::to_string(p[i]);
    }
    return s;
}

// Verdict of the consensus filter over an ascending list of lengths.
struct FilterResult {
    bool candidate = false;
    int reject_length = 0; // first failing length when !candidate
};

inline FilterResult consensus_filter(const Rule& f, const std::vector<int>& lengths,
                                     const DynamicsBudget& budget = {}) {
    if (lengths.empty()) throw domain_error("length range must be nonempty");
    for (size_t i = 1; i < lengths.size(); ++i)
        if (lengths[i] <= lengths[i - 1]) throw domain_error("length range must be ascending");
    for (int L : lengths) {
        if (!analyze_length(f, L, budget).consensus) return {false, L};
    }
    return {true, 0};
}

inline bool is_consensus_candidate(const Rule& f, const std::vector<int>& lengths,
                                   const DynamicsBudget& budget = {}) {
    return consensus_filter(f, lengths, budget).candidate;
}

inline PatternVector pattern(const Rule& f, const DynamicsBudget& budget = {}) {
    PatternVector out{};
    for (int L = kPatternFirstLength; L <= kPatternLastLength; ++L) {
        auto a = analyze_length(f, L, budget);
        if (!a.consensus)
            throw domain_error("rule is not a consensus candidate at length " + std::to_string(L));
        out[static_cast<size_t>(L - kPatternFirstLength)] = a.ones_basin;
    }
    return out;
}

} // namespace cascan
