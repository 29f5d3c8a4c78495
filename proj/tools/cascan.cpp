// cascan: analyze binary one-dimensional cellular automata on rings,
// filter rule spaces for consensus behaviour and certify rule classes.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "cascan/cascan.hpp"

using namespace cascan;

namespace {

// bad flag combinations and enum values exit with the usage code
struct usage_error : std::runtime_error {
    explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

std::string now_stamp() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// rules are given either as full ids (r2:123) or as a bare number plus --radius
Rule rule_from_args(const std::string& rule_arg, double radius) {
    if (!rule_arg.empty() && rule_arg[0] == 'r') return parse_rule_id(rule_arg);
    return Rule::from_wolfram(parse_u64(rule_arg), Extents::from_radius(radius));
}

std::string hex_word(uint64_t bits, int length) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "0x%0*llx", (length + 3) / 4,
                  static_cast<unsigned long long>(bits));
    return buf;
}

struct CertifyFlags {
    CertifyBounds bounds;
    FailingGraphBudget graph;
};

void add_bound_flags(CLI::App* cmd, CertifyFlags& fl) {
    cmd->add_option("--a-max-steps", fl.bounds.a_max_steps,
                    "largest composition exponent tried for class A");
    cmd->add_option("--b-pair-max-steps", fl.bounds.b_pair_max_steps,
                    "largest exponent for the class B pair checks");
    cmd->add_option("--b-grow-max-steps", fl.bounds.b_grow_max_steps,
                    "largest exponent for the class B growth check");
    cmd->add_option("--c-clear-max-steps", fl.bounds.c_clear_max_steps,
                    "largest failing-graph order for class C");
    cmd->add_option("--c-grow-max-steps", fl.bounds.c_grow_max_steps,
                    "largest exponent for the class C growth check");
    cmd->add_option("--compose-table-bits", fl.bounds.compose_table_bits,
                    "memory bound for composed rule tables");
    cmd->add_option("--graph-enumerate-bits", fl.graph.enumerate_max_block_bits,
                    "largest 2^k block enumeration for failing graphs");
    cmd->add_option("--graph-sparse-vertices", fl.graph.sparse_max_vertices,
                    "failing-block budget for the sparse graph path");
}

int run_simulate(const std::string& rule_arg, double radius, const std::string& config,
                 int steps, const std::string& mode) {
    Rule f = rule_from_args(rule_arg, radius);
    if (mode == "block") {
        Block b = block_from_string(config);
        std::cout << block_to_string(b) << "\n";
        for (int s = 0; s < steps && static_cast<int>(b.size()) >= f.neighborhood(); ++s) {
            b = extend_to_block(f, b);
            std::cout << block_to_string(b) << "\n";
        }
        return 0;
    }
    if (mode != "cyclic") throw usage_error("mode must be cyclic or block");
    CyclicConfig c = config_from_string(config);
    std::cout << config_to_string(c) << "\n";
    for (int s = 0; s < steps; ++s) {
        c = step(f, c);
        std::cout << config_to_string(c) << "\n";
    }
    return 0;
}

int run_attractors(const std::string& rule_arg, double radius, int length,
                   const std::string& format, int max_length) {
    Rule f = rule_from_args(rule_arg, radius);
    DynamicsBudget budget;
    budget.max_length = max_length;
    AttractorReport rep = attractors(f, length, budget);
    if (format == "json") {
        nlohmann::json j;
        j["rule"] = rule_id(f);
        j["length"] = rep.length;
        j["attractors"] = nlohmann::json::array();
        for (size_t i = 0; i < rep.attractors.size(); ++i) {
            nlohmann::json a;
            a["basin"] = rep.basin_sizes[i];
            a["cycle"] = nlohmann::json::array();
            for (uint64_t s : rep.attractors[i]) a["cycle"].push_back(hex_word(s, rep.length));
            j["attractors"].push_back(a);
        }
        std::cout << j.dump() << "\n";
        return 0;
    }
    if (format != "text") throw usage_error("format must be text or json");
    std::cout << "rule " << rule_id(f) << " length " << rep.length << "\n";
    for (size_t i = 0; i < rep.attractors.size(); ++i) {
        std::cout << "attractor " << i << ": period " << rep.attractors[i].size() << " basin "
                  << rep.basin_sizes[i] << " cycle";
        for (uint64_t s : rep.attractors[i]) std::cout << " " << hex_word(s, rep.length);
        std::cout << "\n";
    }
    return 0;
}

int run_certify(const std::vector<std::string>& rule_args, double radius, const CertifyFlags& fl,
                const std::string& emit_path, std::string stamp) {
    if (stamp.empty()) stamp = now_stamp();
    std::ofstream emit;
    if (!emit_path.empty()) {
        emit.open(emit_path, std::ios::app);
        if (!emit) throw domain_error("cannot open certificate output: " + emit_path);
    }
    for (const auto& arg : rule_args) {
        Rule f = rule_from_args(arg, radius);
        std::optional<Certificate> cert;
        if (f.extents().symmetric()) cert = certify_class_a(f, fl.bounds);
        if (!cert && f.extents() == Extents{2, 2}) {
            cert = certify_class_b(f, fl.bounds);
            if (!cert) cert = certify_class_c(f, fl.bounds, fl.graph);
        }
        if (cert) {
            cert->stamp = stamp;
            std::cout << rule_id(f) << " class=" << to_string(cert->cls) << " "
                      << certificate_to_json(*cert)["params"].dump() << "\n";
            if (emit.is_open()) emit << certificate_to_json(*cert).dump() << "\n";
        } else {
            std::cout << rule_id(f) << " inconclusive (no certificate within bounds)\n";
        }
    }
    return 0;
}

int run_scan(ScanJob job, bool resume, bool progress, const std::string& rules_csv,
             const std::string& rules_file, const std::string& subspace_kind, uint64_t lo,
             uint64_t hi, uint64_t sample_count) {
    if (progress) {
        job.progress = [](uint64_t done, uint64_t total, const ScanSummary& s) {
            std::cerr << "progress: " << done << "/" << total << " chunks, " << s.canonical_rules
                      << " rules, " << s.candidates << " candidates\n";
        };
    }
    if (resume) {
        if (job.checkpoint_path.empty()) throw usage_error("--resume needs --checkpoint");
        CheckpointState st = checkpoint_load(job.checkpoint_path);
        ScanJob resumed = st.job;
        resumed.checkpoint_path = job.checkpoint_path;
        resumed.workers = job.workers;
        resumed.stop_after_chunks = job.stop_after_chunks;
        resumed.progress = job.progress;
        auto summary = scan(resumed, true);
        std::cerr << "scan " << (summary.complete ? "complete" : "stopped") << ": "
                  << summary.canonical_rules << " canonical rules this run\n";
        return 0;
    }

    if (subspace_kind == "full") {
        job.subspace = Subspace::full();
    } else if (subspace_kind == "range") {
        job.subspace = Subspace::range(lo, hi);
    } else if (subspace_kind == "sample") {
        job.subspace.kind = SubspaceKind::Sample;
        job.subspace.sample_count = sample_count;
    } else if (subspace_kind == "list") {
        std::vector<uint64_t> numbers;
        if (!rules_file.empty()) {
            std::ifstream in(rules_file);
            if (!in) throw domain_error("cannot read rule list: " + rules_file);
            std::string tok;
            while (in >> tok) numbers.push_back(parse_u64(tok));
        }
        std::string cur;
        for (char c : rules_csv + ",") {
            if (c == ',') {
                if (!cur.empty()) numbers.push_back(parse_u64(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (numbers.empty()) throw usage_error("list subspace needs --rules or --rules-file");
        job.subspace = Subspace::of_list(std::move(numbers));
    } else {
        throw usage_error("subspace must be full, range, list or sample");
    }

    auto summary = scan(job);
    std::cerr << "scan " << (summary.complete ? "complete" : "stopped") << ": "
              << summary.canonical_rules << " canonical rules, " << summary.candidates
              << " candidates (A " << summary.class_a << ", B " << summary.class_b << ", C "
              << summary.class_c << ", uncharacterised " << summary.uncharacterised << ")\n";
    return 0;
}

int run_report(const std::string& in_path, bool with_rules) {
    auto rep = pattern_report(in_path);
    for (const auto& g : rep.groups) {
        std::cout << pattern_to_string(g.pattern) << "," << g.rules.size();
        if (with_rules)
            for (const auto& r : g.rules) std::cout << "," << r;
        std::cout << "\n";
    }
    std::cerr << rep.groups.size() << " distinct patterns over " << rep.canonical_candidates
              << " canonical candidates (" << rep.orbit_expanded << " rules orbit-expanded)\n";
    return 0;
}

int run_revalidate(const std::string& certs_path, const CertifyFlags& fl) {
    std::ifstream in(certs_path);
    if (!in) throw domain_error("cannot read certificate file: " + certs_path);
    std::string line;
    size_t ok = 0, bad = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw domain_error(std::string("malformed certificate line: ") + e.what());
        }
        Certificate cert = certificate_from_json(j);
        Rule f = parse_rule_id(cert.rule);
        bool good = revalidate(f, cert, fl.bounds, fl.graph);
        std::cout << cert.rule << " " << to_string(cert.cls) << (good ? " ok" : " FAILED") << "\n";
        good ? ++ok : ++bad;
    }
    std::cerr << ok << " ok, " << bad << " failed\n";
    return bad == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exhaustive analysis of binary 1-D cellular automata on rings"};
    app.require_subcommand(1);

    // shared argument storage
    std::string rule_arg, config, mode = "cyclic", format = "text";
    std::vector<std::string> rule_args;
    double radius = 2.0;
    int steps = 16, length = 0, max_length = 26, compose_steps = 1;
    CertifyFlags fl;
    std::string out_path, emit_path, stamp;

    auto* sim = app.add_subcommand("simulate", "print the orbit of one configuration");
    sim->add_option("--rule", rule_arg, "rule id (r2:123) or number")->required();
    sim->add_option("--radius", radius, "rule radius when --rule is a bare number");
    sim->add_option("--config", config, "initial cells as a 01 string")->required();
    sim->add_option("--steps", steps, "rows to print after the first");
    sim->add_option("--mode", mode, "cyclic (ring) or block (open, shrinking rows)");

    auto* attr = app.add_subcommand("attractors", "exact attractors and basin sizes");
    attr->add_option("--rule", rule_arg)->required();
    attr->add_option("--radius", radius);
    attr->add_option("--length", length, "ring size")->required();
    attr->add_option("--format", format, "text or json");
    attr->add_option("--max-length", max_length, "exact-analysis budget");

    auto* pat = app.add_subcommand("pattern", "ones-basin counts for lengths 5..20");
    pat->add_option("--rule", rule_arg)->required();
    pat->add_option("--radius", radius);
    pat->add_option("--max-length", max_length);

    auto* canon = app.add_subcommand("canon", "canonical representative of a rule");
    canon->add_option("--rule", rule_arg)->required();
    canon->add_option("--radius", radius);

    auto* comp = app.add_subcommand("compose", "export the table of an iterated rule");
    comp->add_option("--rule", rule_arg)->required();
    comp->add_option("--radius", radius);
    comp->add_option("--steps", compose_steps, "composition exponent")->required();
    comp->add_option("--out", out_path, "raw table bit file (bit v at byte v/8, bit v%8)")
        ->required();
    comp->add_option("--max-table-bits", fl.bounds.compose_table_bits);

    auto* cert = app.add_subcommand("certify", "run the class checkers on rules");
    cert->add_option("--rule", rule_args, "rule ids or numbers")->required();
    cert->add_option("--radius", radius);
    cert->add_option("--emit", emit_path, "append certificates to this JSONL file");
    cert->add_option("--stamp", stamp, "validation timestamp (defaults to now)");
    add_bound_flags(cert, fl);

    ScanJob job;
    bool resume = false, report_rules = false;
    std::string subspace_kind = "full", rules_csv, rules_file, in_path;
    uint64_t lo = 0, hi = 0;
    uint64_t sample_count = 0;
    int scan_lmin = 5, scan_lmax = 20;
    auto* scn = app.add_subcommand("scan", "filter and certify a rule space");
    scn->add_option("--radius", radius, "rule space radius");
    scn->add_option("--L-min", scan_lmin, "first filtered ring size");
    scn->add_option("--L-max", scan_lmax, "last filtered ring size");
    scn->add_option("--subspace", subspace_kind, "full | range | list | sample");
    scn->add_option("--lo", lo, "range start (inclusive)");
    scn->add_option("--hi", hi, "range end (inclusive)");
    scn->add_option("--rules", rules_csv, "comma-separated rule numbers for list subspaces");
    scn->add_option("--rules-file", rules_file, "file of rule numbers for list subspaces");
    scn->add_option("--sample", sample_count, "number of sampled canonical rules");
    scn->add_option("--seed", job.subspace.seed, "sampling seed");
    scn->add_option("--workers", job.workers, "worker threads (default: CASCAN_WORKERS or cores)");
    scn->add_option("--out", job.csv_path, "record CSV path");
    scn->add_option("--certs", job.certs_path, "certificate JSONL path");
    scn->add_option("--checkpoint", job.checkpoint_path, "checkpoint JSON path");
    scn->add_flag("--resume", resume, "continue from the checkpoint");
    scn->add_option("--chunk-size", job.chunk_size, "rule numbers per work chunk");
    scn->add_option("--checkpoint-every", job.checkpoint_every, "chunks between checkpoints");
    scn->add_option("--stop-after-chunks", job.stop_after_chunks,
                    "stop after this many chunks (0 = run to completion)");
    bool progress = false;
    scn->add_flag("--progress", progress, "print progress to stderr at checkpoints");
    scn->add_option("--stamp", job.stamp, "stamp recorded on certificates");
    scn->add_option("--max-length", job.dynamics.max_length);
    add_bound_flags(scn, fl);

    auto* rep = app.add_subcommand("report", "group scan candidates by pattern");
    rep->add_option("--in", in_path, "scan CSV")->required();
    rep->add_flag("--rules", report_rules, "list the rules of each pattern");

    auto* reval = app.add_subcommand("revalidate", "re-check stored certificates");
    reval->add_option("--certs", in_path, "certificate JSONL")->required();
    add_bound_flags(reval, fl);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }
    fl.graph.compose_table_bits = fl.bounds.compose_table_bits;

    try {
        if (sim->parsed()) return run_simulate(rule_arg, radius, config, steps, mode);
        if (attr->parsed()) return run_attractors(rule_arg, radius, length, format, max_length);
        if (pat->parsed()) {
            Rule f = rule_from_args(rule_arg, radius);
            DynamicsBudget budget;
            budget.max_length = max_length;
            PatternVector p = pattern(f, budget);
            std::cout << pattern_to_string({p.begin(), p.end()}) << "\n";
            return 0;
        }
        if (canon->parsed()) {
            Rule f = rule_from_args(rule_arg, radius);
            std::cout << canonicalize(f).wolfram_number() << "\n";
            return 0;
        }
        if (comp->parsed()) {
            Rule f = rule_from_args(rule_arg, radius);
            Rule g = compose(f, compose_steps, fl.bounds.compose_table_bits);
            auto bytes = table_to_bytes(g);
            std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
            if (!out) throw domain_error("cannot write table file: " + out_path);
            out.write(reinterpret_cast<const char*>(bytes.data()),
                      static_cast<std::streamsize>(bytes.size()));
            std::cout << format_extents(g.extents()) << " table_bits=" << g.table_size() << " "
                      << out_path << "\n";
            return 0;
        }
        if (cert->parsed()) return run_certify(rule_args, radius, fl, emit_path, stamp);
        if (scn->parsed()) {
            job.extents = Extents::from_radius(radius);
            job.lengths.clear();
            if (scan_lmin < 1 || scan_lmax < scan_lmin)
                throw usage_error("invalid ring size range");
            for (int L = scan_lmin; L <= scan_lmax; ++L) job.lengths.push_back(L);
            job.bounds = fl.bounds;
            job.graph_budget = fl.graph;
            if (job.csv_path.empty() && !resume) throw usage_error("scan needs --out");
            if (job.stamp.empty()) job.stamp = now_stamp();
            if (subspace_kind == "sample" && sample_count == 0)
                throw usage_error("sample subspace needs --sample");
            return run_scan(job, resume, progress, rules_csv, rules_file, subspace_kind, lo,
                            hi, sample_count);
        }
        if (rep->parsed()) return run_report(in_path, report_rules);
        if (reval->parsed()) return run_revalidate(in_path, fl);
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const resource_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 3;
    } catch (const integrity_error& e) {
        std::cerr << "integrity error: " << e.what() << "\n";
        return 1;
    } catch (const domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
