#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "cascan/certify.hpp"
#include "cascan/dynamics.hpp"
#include "cascan/rule.hpp"

namespace cascan {

// ---- rule subspaces ----

enum class SubspaceKind { Full, Range, List, Sample };

struct Subspace {
    SubspaceKind kind = SubspaceKind::Full;
    uint64_t lo = 0, hi = 0;          // Range, inclusive
    std::vector<uint64_t> list;       // List
    uint64_t sample_count = 0;        // Sample
    uint64_t seed = 0;

    static Subspace full() { return {}; }
    static Subspace range(uint64_t lo, uint64_t hi) {
        Subspace s;
        s.kind = SubspaceKind::Range;
        s.lo = lo;
        s.hi = hi;
        return s;
    }
    static Subspace of_list(std::vector<uint64_t> l) {
        Subspace s;
        s.kind = SubspaceKind::List;
        s.list = std::move(l);
        return s;
    }
    static Subspace sample(uint64_t count, uint64_t seed) {
        Subspace s;
        s.kind = SubspaceKind::Sample;
        s.sample_count = count;
        s.seed = seed;
        return s;
    }
};

namespace detail {

// Uniform over canonical representatives: draw numbers, keep the ones that
// are their own canonical form, until `count` distinct draws accumulate.
inline std::vector<uint64_t> materialize_sample(Extents e, uint64_t count, uint64_t seed) {
    if (e.neighborhood() > 5) throw resource_error("sampling beyond 2^32 rules is not supported");
    uint64_t space = uint64_t{1} << (uint64_t{1} << e.neighborhood());
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<uint64_t> dist(0, space - 1);
    std::set<uint64_t> keep;
    uint64_t draws = 0, max_draws = 1000 * count + 1000000;
    while (keep.size() < count) {
        if (++draws > max_draws)
            throw domain_error("sample size appears to exceed the canonical rule count");
        uint64_t n = dist(rng);
        Rule r = Rule::from_wolfram(n, e);
        if (is_canonical(r)) keep.insert(n);
    }
    return {keep.begin(), keep.end()};
}

// The ascending number sequence a subspace covers, before canonical filtering.
struct Domain {
    bool contiguous = true;
    uint64_t lo = 0, hi = 0;              // contiguous case, inclusive
    std::vector<uint64_t> numbers;        // list case, sorted unique
    uint64_t size() const {
        return contiguous ? (hi - lo + 1) : numbers.size();
    }
    uint64_t at(uint64_t i) const { return contiguous ? lo + i : numbers[static_cast<size_t>(i)]; }
};

inline Domain make_domain(Extents e, const Subspace& s) {
    Domain d;
    if (e.neighborhood() > 6) throw resource_error("rule space too large to enumerate");
    uint64_t table_bits = uint64_t{1} << e.neighborhood();
    uint64_t max_number = table_bits == 64 ? ~uint64_t{0} : (uint64_t{1} << table_bits) - 1;
    switch (s.kind) {
        case SubspaceKind::Full:
            d.lo = 0;
            d.hi = max_number;
            break;
        case SubspaceKind::Range:
            if (s.lo > s.hi || s.hi > max_number) throw domain_error("invalid rule number range");
            d.lo = s.lo;
            d.hi = s.hi;
            break;
        case SubspaceKind::List: {
            d.contiguous = false;
            d.numbers = s.list;
            std::sort(d.numbers.begin(), d.numbers.end());
            d.numbers.erase(std::unique(d.numbers.begin(), d.numbers.end()), d.numbers.end());
            for (uint64_t n : d.numbers)
                if (n > max_number) throw domain_error("rule number out of range in list");
            break;
        }
        case SubspaceKind::Sample:
            d.contiguous = false;
            d.numbers = materialize_sample(e, s.sample_count, s.seed);
            break;
    }
    return d;
}

} // namespace detail

// Stream the canonical representatives intersecting the subspace, ascending.
template <typename Fn>
inline void enumerate_canonical(Extents e, const Subspace& s, Fn&& fn) {
    if (!e.symmetric()) throw domain_error("canonical enumeration requires symmetric extents");
    detail::Domain d = detail::make_domain(e, s);
    bool radius2 = e == Extents{2, 2};
    for (uint64_t i = 0; i < d.size(); ++i) {
        uint64_t n = d.at(i);
        if (radius2) {
            // avoid building a table per number; this loop sees the full space
            if (!detail::is_canonical_u32(static_cast<uint32_t>(n))) continue;
            fn(Rule::from_wolfram(n, e));
            continue;
        }
        Rule r = Rule::from_wolfram(n, e);
        if (is_canonical(r)) fn(r);
    }
}

inline std::vector<uint64_t> canonical_numbers(Extents e, const Subspace& s) {
    std::vector<uint64_t> out;
    enumerate_canonical(e, s, [&](const Rule& r) { out.push_back(r.wolfram_number()); });
    return out;
}

// ---- scan job ----

struct ScanJob {
    Extents extents{2, 2};
    std::vector<int> lengths;             // ascending consensus filter lengths
    CertifyBounds bounds;
    FailingGraphBudget graph_budget;
    DynamicsBudget dynamics;
    Subspace subspace;
    int workers = 0;                      // 0: CASCAN_WORKERS env or hardware
    std::string csv_path;
    std::string certs_path;
    std::string checkpoint_path;
    std::string stamp;                    // recorded on every certificate
    uint64_t chunk_size = 4096;
    uint64_t checkpoint_every = 64;       // flushed chunks between checkpoints
    uint64_t stop_after_chunks = 0;       // 0 = run to completion
    std::function<void(uint64_t chunks_done, uint64_t chunks_total,
                       const struct ScanSummary&)>
        progress;                         // called at checkpoint boundaries

    ScanJob() {
        for (int L = 5; L <= 20; ++L) lengths.push_back(L);
    }
};

enum class Verdict { Candidate, Rejected, Inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Candidate: return "candidate";
        case Verdict::Rejected: return "rejected";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

enum class ClassLabel { None, A, B, C, Uncharacterised };

inline std::string to_string(ClassLabel c) {
    switch (c) {
        case ClassLabel::None: return "";
        case ClassLabel::A: return "A";
        case ClassLabel::B: return "B";
        case ClassLabel::C: return "C";
        case ClassLabel::Uncharacterised: return "uncharacterised";
    }
    return "?";
}

struct ScanRecord {
    std::string rule;
    Verdict verdict = Verdict::Rejected;
    int reject_length = 0;                 // set when rejected
    ClassLabel label = ClassLabel::None;
    std::vector<uint64_t> pattern;         // present iff candidate
    std::optional<Certificate> cert;
};

inline const char* kScanCsvHeader = "rule,verdict,reject_L,class,pattern\n";

inline std::string scan_record_csv(const ScanRecord& r) {
    std::string line = r.rule;
    line += ',';
    line += to_string(r.verdict);
    line += ',';
    if (r.verdict == Verdict::Rejected) line += std::to_string(r.reject_length);
    line += ',';
    line += to_string(r.label);
    line += ',';
    if (r.verdict == Verdict::Candidate) line += pattern_to_string(r.pattern);
    line += '\n';
    return line;
}

// Filter, pattern and certification for one rule.
inline ScanRecord scan_rule(const Rule& f, const ScanJob& job) {
    ScanRecord rec;
    rec.rule = rule_id(f);
    try {
        for (int L : job.lengths) {
            auto a = analyze_length(f, L, job.dynamics);
            if (!a.consensus) {
                rec.verdict = Verdict::Rejected;
                rec.reject_length = L;
                rec.pattern.clear();
                return rec;
            }
            rec.pattern.push_back(a.ones_basin);
        }
    } catch (const resource_error&) {
        rec.verdict = Verdict::Inconclusive;
        rec.pattern.clear();
        return rec;
    }
    rec.verdict = Verdict::Candidate;
    rec.label = ClassLabel::Uncharacterised;
    try {
        std::optional<Certificate> cert;
        if (f.extents().symmetric()) cert = certify_class_a(f, job.bounds);
        if (!cert && f.extents() == Extents{2, 2}) {
            cert = certify_class_b(f, job.bounds);
            if (!cert) cert = certify_class_c(f, job.bounds, job.graph_budget);
        }
        if (cert) {
            cert->stamp = job.stamp;
            rec.label = cert->cls == CertClass::A   ? ClassLabel::A
                        : cert->cls == CertClass::B ? ClassLabel::B
                                                    : ClassLabel::C;
            rec.cert = std::move(cert);
        }
    } catch (const resource_error&) {
        rec.label = ClassLabel::Uncharacterised; // certifier budget ran out
    }
    return rec;
}

// ---- checkpointing ----

namespace detail {

inline nlohmann::json subspace_to_json(const Subspace& s) {
    nlohmann::json j;
    switch (s.kind) {
        case SubspaceKind::Full: j["kind"] = "full"; break;
        case SubspaceKind::Range:
            j["kind"] = "range";
            j["lo"] = s.lo;
            j["hi"] = s.hi;
            break;
        case SubspaceKind::List:
            j["kind"] = "list";
            j["list"] = s.list;
            break;
        case SubspaceKind::Sample:
            j["kind"] = "sample";
            j["count"] = s.sample_count;
            j["seed"] = s.seed;
            break;
    }
    return j;
}

inline Subspace subspace_from_json(const nlohmann::json& j) {
    Subspace s;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "full") {
        s.kind = SubspaceKind::Full;
    } else if (kind == "range") {
        s.kind = SubspaceKind::Range;
        s.lo = j.at("lo").get<uint64_t>();
        s.hi = j.at("hi").get<uint64_t>();
    } else if (kind == "list") {
        s.kind = SubspaceKind::List;
        s.list = j.at("list").get<std::vector<uint64_t>>();
    } else if (kind == "sample") {
        s.kind = SubspaceKind::Sample;
        s.sample_count = j.at("count").get<uint64_t>();
        s.seed = j.at("seed").get<uint64_t>();
    } else {
        throw integrity_error("unknown subspace kind: " + kind);
    }
    return s;
}

inline nlohmann::json job_to_json(const ScanJob& job) {
    nlohmann::json j;
    j["extents"] = {job.extents.left, job.extents.right};
    j["lengths"] = job.lengths;
    j["bounds"] = {{"a_max_steps", job.bounds.a_max_steps},
                   {"b_pair_max_steps", job.bounds.b_pair_max_steps},
                   {"b_grow_max_steps", job.bounds.b_grow_max_steps},
                   {"c_clear_max_steps", job.bounds.c_clear_max_steps},
                   {"c_grow_max_steps", job.bounds.c_grow_max_steps},
                   {"compose_table_bits", job.bounds.compose_table_bits}};
    j["graph_budget"] = {{"dense_max_block_bits", job.graph_budget.dense_max_block_bits},
                         {"enumerate_max_block_bits", job.graph_budget.enumerate_max_block_bits},
                         {"sparse_max_vertices", job.graph_budget.sparse_max_vertices},
                         {"probe_max_period", job.graph_budget.probe_max_period}};
    j["max_length"] = job.dynamics.max_length;
    j["subspace"] = subspace_to_json(job.subspace);
    j["chunk_size"] = job.chunk_size;
    j["stamp"] = job.stamp;
    j["csv"] = job.csv_path;
    j["certs"] = job.certs_path;
    return j;
}

inline ScanJob job_from_json(const nlohmann::json& j) {
    ScanJob job;
    job.extents = Extents{j.at("extents").at(0).get<int>(), j.at("extents").at(1).get<int>()};
    job.lengths = j.at("lengths").get<std::vector<int>>();
    const auto& b = j.at("bounds");
    job.bounds.a_max_steps = b.at("a_max_steps").get<int>();
    job.bounds.b_pair_max_steps = b.at("b_pair_max_steps").get<int>();
    job.bounds.b_grow_max_steps = b.at("b_grow_max_steps").get<int>();
    job.bounds.c_clear_max_steps = b.at("c_clear_max_steps").get<int>();
    job.bounds.c_grow_max_steps = b.at("c_grow_max_steps").get<int>();
    job.bounds.compose_table_bits = b.at("compose_table_bits").get<uint64_t>();
    const auto& g = j.at("graph_budget");
    job.graph_budget.dense_max_block_bits = g.at("dense_max_block_bits").get<int>();
    job.graph_budget.enumerate_max_block_bits = g.at("enumerate_max_block_bits").get<int>();
    job.graph_budget.sparse_max_vertices = g.at("sparse_max_vertices").get<uint64_t>();
    job.graph_budget.probe_max_period = g.at("probe_max_period").get<int>();
    job.graph_budget.compose_table_bits = job.bounds.compose_table_bits;
    job.dynamics.max_length = j.at("max_length").get<int>();
    job.subspace = subspace_from_json(j.at("subspace"));
    job.chunk_size = j.at("chunk_size").get<uint64_t>();
    job.stamp = j.at("stamp").get<std::string>();
    job.csv_path = j.at("csv").get<std::string>();
    job.certs_path = j.at("certs").get<std::string>();
    return job;
}

// Identity of a job for resume validation: everything that shapes the output
// bytes (not worker count, not stop limits).
inline uint64_t job_fingerprint(const ScanJob& job) {
    return fnv1a(job_to_json(job).dump());
}

} // namespace detail

struct CheckpointState {
    ScanJob job;
    uint64_t chunks_done = 0;
    uint64_t csv_bytes = 0;
    uint64_t certs_bytes = 0;
    bool complete = false;
};

inline void checkpoint_save(const std::string& path, const CheckpointState& st) {
    nlohmann::json j;
    j["job"] = detail::job_to_json(st.job);
    j["fingerprint"] = to_hex(detail::job_fingerprint(st.job));
    j["chunks_done"] = st.chunks_done;
    j["csv_bytes"] = st.csv_bytes;
    j["certs_bytes"] = st.certs_bytes;
    j["complete"] = st.complete;
    std::string payload = j.dump();
    j["checksum"] = to_hex(fnv1a(payload));
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw domain_error("cannot write checkpoint: " + path);
        out << j.dump() << "\n";
    }
    std::filesystem::rename(tmp, path);
}

inline CheckpointState checkpoint_load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("cannot read checkpoint: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw integrity_error(std::string("checkpoint is not valid JSON: ") + e.what());
    }
    try {
        std::string stored = j.at("checksum").get<std::string>();
        nlohmann::json body = j;
        body.erase("checksum");
        if (to_hex(fnv1a(body.dump())) != stored)
            throw integrity_error("checkpoint checksum mismatch: " + path);
        CheckpointState st;
        st.job = detail::job_from_json(j.at("job"));
        if (j.at("fingerprint").get<std::string>() != to_hex(detail::job_fingerprint(st.job)))
            throw integrity_error("checkpoint fingerprint does not match its job config");
        st.chunks_done = j.at("chunks_done").get<uint64_t>();
        st.csv_bytes = j.at("csv_bytes").get<uint64_t>();
        st.certs_bytes = j.at("certs_bytes").get<uint64_t>();
        st.complete = j.at("complete").get<bool>();
        return st;
    } catch (const nlohmann::json::exception& e) {
        throw integrity_error(std::string("malformed checkpoint: ") + e.what());
    }
}

// ---- the scan itself ----

struct ScanSummary {
    uint64_t canonical_rules = 0;
    uint64_t candidates = 0;
    uint64_t rejected = 0;
    uint64_t inconclusive = 0;
    uint64_t class_a = 0, class_b = 0, class_c = 0, uncharacterised = 0;
    uint64_t chunks_done = 0;
    bool complete = false;
};

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CASCAN_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// Runs the job; output bytes depend only on the job config, never on worker
// count or interruption points. Chunks are processed in parallel but flushed
// strictly in order by a single writer.
inline ScanSummary scan(const ScanJob& job, bool resume = false) {
    if (job.csv_path.empty()) throw domain_error("scan needs an output CSV path");
    if (job.lengths.empty()) throw domain_error("scan needs a nonempty length range");
    for (size_t i = 1; i < job.lengths.size(); ++i)
        if (job.lengths[i] <= job.lengths[i - 1])
            throw domain_error("scan length range must be ascending");

    detail::Domain domain = detail::make_domain(job.extents, job.subspace);
    uint64_t total_chunks = (domain.size() + job.chunk_size - 1) / job.chunk_size;

    uint64_t start_chunk = 0;
    uint64_t csv_bytes = 0, certs_bytes = 0;
    bool write_certs = !job.certs_path.empty();

    if (resume) {
        if (job.checkpoint_path.empty()) throw domain_error("resume needs a checkpoint path");
        CheckpointState st = checkpoint_load(job.checkpoint_path);
        if (detail::job_fingerprint(st.job) != detail::job_fingerprint(job))
            throw integrity_error("checkpoint belongs to a different job configuration");
        if (st.complete) {
            ScanSummary s;
            s.chunks_done = st.chunks_done;
            s.complete = true;
            return s;
        }
        start_chunk = st.chunks_done;
        csv_bytes = st.csv_bytes;
        certs_bytes = st.certs_bytes;
        if (!std::filesystem::exists(job.csv_path))
            throw integrity_error("resume: CSV output file is missing");
        std::filesystem::resize_file(job.csv_path, csv_bytes);
        if (write_certs) {
            if (!std::filesystem::exists(job.certs_path))
                throw integrity_error("resume: certificate output file is missing");
            std::filesystem::resize_file(job.certs_path, certs_bytes);
        }
    }

    std::ofstream csv(job.csv_path, resume ? std::ios::in | std::ios::out : std::ios::trunc);
    if (!csv) throw domain_error("cannot open CSV output: " + job.csv_path);
    if (resume)
        csv.seekp(static_cast<std::streamoff>(csv_bytes));
    else {
        csv << kScanCsvHeader;
        csv_bytes = std::string(kScanCsvHeader).size();
    }
    std::ofstream certs;
    if (write_certs) {
        certs.open(job.certs_path, resume ? std::ios::in | std::ios::out : std::ios::trunc);
        if (!certs) throw domain_error("cannot open certificate output: " + job.certs_path);
        if (resume) certs.seekp(static_cast<std::streamoff>(certs_bytes));
    }

    uint64_t end_chunk = total_chunks;
    if (job.stop_after_chunks > 0)
        end_chunk = std::min(total_chunks, start_chunk + job.stop_after_chunks);

    struct ChunkOut {
        std::string csv, certs;
        ScanSummary stats;
    };

    std::mutex mu;
    std::map<uint64_t, ChunkOut> pending;
    uint64_t next_write = start_chunk;
    uint64_t last_checkpointed = start_chunk;
    ScanSummary summary;
    std::atomic<uint64_t> cursor{start_chunk};
    std::exception_ptr failure;

    auto flush_ready = [&]() { // caller holds mu
        while (true) {
            auto it = pending.find(next_write);
            if (it == pending.end()) break;
            csv << it->second.csv;
            csv_bytes += it->second.csv.size();
            if (write_certs) {
                certs << it->second.certs;
                certs_bytes += it->second.certs.size();
            }
            const auto& st = it->second.stats;
            summary.canonical_rules += st.canonical_rules;
            summary.candidates += st.candidates;
            summary.rejected += st.rejected;
            summary.inconclusive += st.inconclusive;
            summary.class_a += st.class_a;
            summary.class_b += st.class_b;
            summary.class_c += st.class_c;
            summary.uncharacterised += st.uncharacterised;
            pending.erase(it);
            ++next_write;
            bool final_chunk = next_write == end_chunk;
            if (final_chunk || next_write - last_checkpointed >= job.checkpoint_every) {
                if (!job.checkpoint_path.empty()) {
                    csv.flush();
                    if (write_certs) certs.flush();
                    CheckpointState cp;
                    cp.job = job;
                    cp.chunks_done = next_write;
                    cp.csv_bytes = csv_bytes;
                    cp.certs_bytes = certs_bytes;
                    cp.complete = next_write == total_chunks;
                    checkpoint_save(job.checkpoint_path, cp);
                }
                last_checkpointed = next_write;
                if (job.progress) job.progress(next_write, total_chunks, summary);
            }
        }
    };

    auto worker = [&]() {
        try {
            while (true) {
                uint64_t c = cursor.fetch_add(1);
                if (c >= end_chunk) break;
                {
                    std::lock_guard<std::mutex> lk(mu);
                    if (failure) break;
                }
                ChunkOut out;
                // one retry per chunk before giving up on the whole job
                for (int attempt = 0;; ++attempt) {
                    try {
                        out = ChunkOut{};
                        bool radius2 = job.extents == Extents{2, 2};
                        uint64_t begin = c * job.chunk_size;
                        uint64_t end = std::min(domain.size(), begin + job.chunk_size);
                        for (uint64_t i = begin; i < end; ++i) {
                            uint64_t n = domain.at(i);
                            if (radius2 && !detail::is_canonical_u32(static_cast<uint32_t>(n)))
                                continue;
                            Rule r = Rule::from_wolfram(n, job.extents);
                            if (!radius2 && !is_canonical(r)) continue;
                            ScanRecord rec = scan_rule(r, job);
                            out.csv += scan_record_csv(rec);
                            out.stats.canonical_rules++;
                            switch (rec.verdict) {
                                case Verdict::Candidate: out.stats.candidates++; break;
                                case Verdict::Rejected: out.stats.rejected++; break;
                                case Verdict::Inconclusive: out.stats.inconclusive++; break;
                            }
                            switch (rec.label) {
                                case ClassLabel::A: out.stats.class_a++; break;
                                case ClassLabel::B: out.stats.class_b++; break;
                                case ClassLabel::C: out.stats.class_c++; break;
                                case ClassLabel::Uncharacterised: out.stats.uncharacterised++; break;
                                case ClassLabel::None: break;
                            }
                            if (rec.cert && write_certs)
                                out.certs += certificate_to_json(*rec.cert).dump() + "\n";
                        }
                        break;
                    } catch (...) {
                        if (attempt >= 1) throw;
                    }
                }
                std::lock_guard<std::mutex> lk(mu);
                pending.emplace(c, std::move(out));
                flush_ready();
            }
        } catch (...) {
            std::lock_guard<std::mutex> lk(mu);
            if (!failure) failure = std::current_exception();
        }
    };

    int nworkers = resolve_workers(job.workers);
    std::vector<std::thread> threads;
    for (int i = 0; i < nworkers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);

    csv.flush();
    if (write_certs) certs.flush();
    summary.chunks_done = next_write;
    summary.complete = next_write == total_chunks;
    if (!job.checkpoint_path.empty() && next_write != last_checkpointed) {
        CheckpointState cp;
        cp.job = job;
        cp.chunks_done = next_write;
        cp.csv_bytes = csv_bytes;
        cp.certs_bytes = certs_bytes;
        cp.complete = summary.complete;
        checkpoint_save(job.checkpoint_path, cp);
    }
    return summary;
}

// ---- pattern report ----

struct PatternGroup {
    std::vector<uint64_t> pattern;
    std::vector<std::string> rules;
};

struct PatternReport {
    std::vector<PatternGroup> groups;      // lexicographic by pattern
    uint64_t canonical_candidates = 0;
    uint64_t orbit_expanded = 0;           // counting all four symmetry variants
};

inline std::vector<uint64_t> parse_pattern(const std::string& s) {
    std::vector<uint64_t> out;
    std::string cur;
    for (char c : s) {
        if (c == ';') {
            out.push_back(parse_u64(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(parse_u64(cur));
    return out;
}

// Groups the candidate records of a scan CSV by pattern vector.
inline PatternReport pattern_report(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw domain_error("cannot read scan output: " + csv_path);
    std::string line;
    if (!std::getline(in, line) || line != "rule,verdict,reject_L,class,pattern")
        throw domain_error("not a scan CSV: " + csv_path);
    std::map<std::vector<uint64_t>, std::vector<std::string>> groups;
    PatternReport rep;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                cols.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        cols.push_back(cur);
        if (cols.size() != 5) throw domain_error("malformed scan CSV line: " + line);
        if (cols[1] != "candidate") continue;
        groups[parse_pattern(cols[4])].push_back(cols[0]);
        rep.canonical_candidates++;
        Rule r = parse_rule_id(cols[0]);
        std::set<std::vector<uint64_t>> orbit;
        for (const auto& v : symmetry_variants(r)) orbit.insert(v.table_words());
        rep.orbit_expanded += orbit.size();
    }
    for (auto& [pat, rules] : groups) rep.groups.push_back({pat, std::move(rules)});
    return rep;
}

} // namespace cascan
