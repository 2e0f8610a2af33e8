// Command-line front end: parse a program, run the liveness-coupled
// points-to analysis (or the always-live baseline), and dump tables.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lfcpa/lfcpa.hpp"

namespace {

using namespace lfcpa;
using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<bool> read_branches(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<bool> out;
    std::string tok;
    while (in >> tok) {
        if (tok == "0" || tok == "F" || tok == "f") out.push_back(false);
        else if (tok == "1" || tok == "T" || tok == "t") out.push_back(true);
        else throw std::runtime_error("branch scripts hold 0/1 tokens, got '" + tok + "'");
    }
    return out;
}

// Deterministic order: the rendered form is the sort key.
std::vector<std::string> sorted_renders(const LivenessSet& s, bool ascii) {
    std::vector<std::string> out;
    for (const auto& p : s) out.push_back(p.render(ascii));
    std::sort(out.begin(), out.end());
    return out;
}

std::string render_set(const LivenessSet& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& r : sorted_renders(s, false)) {
        if (!first) out += ", ";
        out += r;
        first = false;
    }
    return out + "}";
}

std::vector<std::pair<std::string, std::string>> sorted_pairs(const PointsToRel& rel,
                                                              bool ascii) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [src, ts] : rel.rows()) {
        std::string s = src.render(ascii);
        if (ts.is_universal()) {
            out.emplace_back(s, "T");
            continue;
        }
        for (const auto& t : ts.elems()) out.emplace_back(s, t.render(ascii));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string render_rel(const PointsToRel& rel) {
    std::string out = "{";
    bool first = true;
    for (const auto& [s, t] : sorted_pairs(rel, false)) {
        if (!first) out += ", ";
        out += "(" + s + ", " + t + ")";
        first = false;
    }
    return out + "}";
}

std::string render_targets(const TargetSet& ts) {
    if (ts.is_universal()) return "T";
    std::vector<std::string> parts;
    for (const auto& t : ts.elems()) parts.push_back(t.render(false));
    std::sort(parts.begin(), parts.end());
    std::string out = "{";
    for (std::size_t i = 0; i < parts.size(); ++i)
        out += (i ? ", " : "") + parts[i];
    return out + "}";
}

ordered_json json_set(const LivenessSet& s) {
    return ordered_json(sorted_renders(s, true));
}

ordered_json json_rel(const PointsToRel& rel) {
    ordered_json arr = ordered_json::array();
    for (const auto& [s, t] : sorted_pairs(rel, true))
        arr.push_back(ordered_json::array({s, t}));
    return arr;
}

ordered_json json_targets(const TargetSet& ts) {
    if (ts.is_universal()) return "T";
    std::vector<std::string> parts;
    for (const auto& t : ts.elems()) parts.push_back(t.render(true));
    std::sort(parts.begin(), parts.end());
    return ordered_json(parts);
}

struct Options {
    std::string input;
    std::string dump = "pointsto";
    std::string format = "text";
    std::string mode = "lfcpa";
    std::string branches_file;
    bool trace_fixpoint = false;
    int fuel = 1000;
};

void dump_text(const Cfg& cfg, const AnalysisResult& res,
               const std::vector<ExtractorResult>& ex, const Options& opt,
               std::ostream& os) {
    os << "== proc " << cfg.proc << " ==\n";
    for (const auto& node : cfg.nodes) {
        const NodeFacts& f = res.facts[static_cast<std::size_t>(node.id)];
        os << "n" << node.id << ": " << render(node.stmt) << "\n";
        if (opt.dump == "liveness" || opt.dump == "pointsto") {
            os << "  Lin:  " << render_set(f.lin) << "\n";
            os << "  Lout: " << render_set(f.lout) << "\n";
        }
        if (opt.dump == "pointsto") {
            os << "  Ain:  " << render_rel(f.ain) << "\n";
            os << "  Aout: " << render_rel(f.aout) << "\n";
        }
        if (opt.dump == "extractors") {
            const ExtractorResult& e = ex[static_cast<std::size_t>(node.id)];
            os << "  Def:     " << render_set(e.def) << "\n";
            os << "  Kill:    " << render_set(e.kill) << "\n";
            os << "  Ref:     " << render_set(e.ref) << "\n";
            os << "  Pointee: " << render_targets(e.pointee) << "\n";
        }
    }
}

ordered_json dump_json(const Cfg& cfg, const AnalysisResult& res,
                       const std::vector<ExtractorResult>& ex) {
    ordered_json proc;
    proc["procedure"] = cfg.proc;
    proc["nodes"] = ordered_json::array();
    for (const auto& node : cfg.nodes) {
        const NodeFacts& f = res.facts[static_cast<std::size_t>(node.id)];
        const ExtractorResult& e = ex[static_cast<std::size_t>(node.id)];
        ordered_json jn;
        jn["id"] = node.id;
        jn["stmt"] = render(node.stmt);
        jn["lin"] = json_set(f.lin);
        jn["lout"] = json_set(f.lout);
        jn["ain"] = json_rel(f.ain);
        jn["aout"] = json_rel(f.aout);
        jn["def"] = json_set(e.def);
        jn["kill"] = json_set(e.kill);
        jn["ref"] = json_set(e.ref);
        jn["pointee"] = json_targets(e.pointee);
        proc["nodes"].push_back(std::move(jn));
    }
    return proc;
}

void dump_trace_text(const Cfg& cfg, const RunResult& run, std::ostream& os) {
    os << "== trace of proc " << cfg.proc << " ==\n";
    for (std::size_t i = 0; i < run.steps.size(); ++i) {
        const TraceStep& st = run.steps[i];
        os << "step " << i << ": n" << st.node << " "
           << render(cfg.node(st.node).stmt) << "\n";
        std::vector<std::string> reads;
        for (const auto& c : st.reads) reads.push_back(c.render());
        std::sort(reads.begin(), reads.end());
        if (!reads.empty()) {
            os << "  reads:";
            for (const auto& r : reads) os << " " << r;
            os << "\n";
        }
        for (const auto& w : st.writes) os << "  writes: " << w.render() << "\n";
    }
    if (run.halted) os << "halted: " << run.halt_reason << "\n";
    else if (run.reached_end) os << "finished\n";
    else os << "out of fuel\n";
}

void trace_fixpoint(const Cfg& cfg, const AnalysisResult& res, std::ostream& os) {
    os << "== fixpoint rounds of proc " << cfg.proc << " ==\n";
    std::size_t weight = res.universe.sources.size() + 1;
    for (std::size_t r = 0; r < res.round_snapshots.size(); ++r) {
        std::size_t live = 0, pairs = 0;
        for (const auto& f : res.round_snapshots[r]) {
            live += f.lin.size();
            pairs += f.ain.pair_count(weight);
        }
        os << "round " << (r + 1) << ": live names " << live
           << ", stored pairs " << pairs << "\n";
    }
    os << "rounds: " << res.stats.rounds
       << ", node visits: " << res.stats.node_visits << "\n";
}

std::size_t total_pairs(const AnalysisResult& res) {
    std::size_t weight = res.universe.sources.size() + 1;
    std::size_t n = 0;
    for (const auto& f : res.facts) n += f.ain.pair_count(weight);
    return n;
}

int run(const Options& opt) {
    CompiledProgram prog = compile(read_file(opt.input));

    RunConfig rc;
    rc.fuel = opt.fuel;
    if (!opt.branches_file.empty()) rc.branches = read_branches(opt.branches_file);

    ordered_json all = ordered_json::array();
    for (const Cfg& cfg : prog.cfgs) {
        if (opt.dump == "trace") {
            install_heap_types(cfg, *prog.types);
            RunResult run = run_program(cfg, *prog.types, rc);
            dump_trace_text(cfg, run, std::cout);
            continue;
        }

        SolveOptions so;
        so.collect_rounds = opt.trace_fixpoint;
        so.mode = opt.mode == "baseline" ? SolveMode::Baseline : SolveMode::Lfcpa;
        AnalysisResult res = solve(cfg, *prog.types, so);
        std::vector<ExtractorResult> ex = node_extractors(cfg, *prog.types, res);

        if (opt.mode == "both") {
            SolveOptions bo;
            bo.mode = SolveMode::Baseline;
            AnalysisResult base = solve(cfg, *prog.types, bo);
            if (opt.format == "text") {
                dump_text(cfg, res, ex, opt, std::cout);
                std::cout << "-- baseline (everything live) --\n";
                std::vector<ExtractorResult> bex =
                    node_extractors(cfg, *prog.types, base);
                dump_text(cfg, base, bex, opt, std::cout);
                std::cout << "pairs kept: " << total_pairs(res) << " of "
                          << total_pairs(base) << " baseline\n";
            } else {
                ordered_json j;
                j["lfcpa"] = dump_json(cfg, res, ex);
                j["baseline"] =
                    dump_json(cfg, base, node_extractors(cfg, *prog.types, base));
                all.push_back(std::move(j));
            }
            continue;
        }

        if (opt.trace_fixpoint) trace_fixpoint(cfg, res, std::cout);
        if (opt.format == "json") all.push_back(dump_json(cfg, res, ex));
        else dump_text(cfg, res, ex, opt, std::cout);
    }
    if (opt.format == "json" && opt.dump != "trace")
        std::cout << (all.size() == 1 ? all.front() : all).dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"liveness-based flow-sensitive points-to analysis"};
    Options opt;
    app.add_option("input", opt.input, "program to analyze")->required();
    app.add_option("--dump", opt.dump, "what to print")
        ->check(CLI::IsMember({"liveness", "pointsto", "extractors", "trace"}))
        ->capture_default_str();
    app.add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    app.add_option("--mode", opt.mode, "analysis variant")
        ->check(CLI::IsMember({"lfcpa", "baseline", "both"}))
        ->capture_default_str();
    app.add_option("--branches", opt.branches_file,
                   "file of 0/1 branch outcomes for --dump=trace");
    app.add_option("--fuel", opt.fuel, "interpreter step limit")
        ->capture_default_str();
    app.add_flag("--trace-fixpoint", opt.trace_fixpoint,
                 "print per-round fixpoint sizes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        return run(opt);
    } catch (const lfcpa::parse_error& e) {
        std::cerr << opt.input << ":" << e.what() << "\n";
        return 1;
    } catch (const lfcpa::internal_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
