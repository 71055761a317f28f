#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "taintjs/engine.hpp"
#include "taintjs/fixtures.hpp"
#include "taintjs/remote.hpp"
#include "taintjs/ticr.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace taintjs;

namespace {

struct Options {
    std::string package;
    int cwe = 79;
    std::string ruleset = "R4";
    std::string oracle = "deterministic";
    int runs = 3;
    int max_iterations = 5;
    bool exhaustive = false;
    int access_path_limit = 2;
    int min_confidence = 0;
    bool include_filtered = false;
    bool dump_graph_flag = false;
    std::string out = "out";
    std::string specs_dir;
    std::string ticr_direction = "both";
    std::vector<std::string> disabled_rules;
    std::string remote_host = "127.0.0.1";
    int remote_port = 8000;
    std::string remote_model = "analysis-model";
    std::string api_key_env = "TAINTJS_API_KEY";
    std::string config_file;
};

// Flat key=value configuration mirroring the flag names; an explicit flag on
// the command line always wins over the file.
void apply_config(CLI::App* cmd, Options& opt) {
    if (opt.config_file.empty()) return;
    std::ifstream in(opt.config_file);
    if (!in) throw Error("cannot read config file: " + opt.config_file);
    std::map<std::string, std::function<void(const std::string&)>> setters = {
        {"package", [&](const std::string& v) { opt.package = v; }},
        {"cwe", [&](const std::string& v) { opt.cwe = std::stoi(v); }},
        {"ruleset", [&](const std::string& v) { opt.ruleset = v; }},
        {"oracle", [&](const std::string& v) { opt.oracle = v; }},
        {"runs", [&](const std::string& v) { opt.runs = std::stoi(v); }},
        {"max-iterations",
         [&](const std::string& v) { opt.max_iterations = std::stoi(v); }},
        {"exhaustive",
         [&](const std::string& v) { opt.exhaustive = v != "false"; }},
        {"access-path-limit",
         [&](const std::string& v) { opt.access_path_limit = std::stoi(v); }},
        {"min-confidence",
         [&](const std::string& v) { opt.min_confidence = std::stoi(v); }},
        {"include-filtered",
         [&](const std::string& v) { opt.include_filtered = v != "false"; }},
        {"dump-graph",
         [&](const std::string& v) { opt.dump_graph_flag = v != "false"; }},
        {"out", [&](const std::string& v) { opt.out = v; }},
        {"specs-dir", [&](const std::string& v) { opt.specs_dir = v; }},
        {"ticr-direction",
         [&](const std::string& v) { opt.ticr_direction = v; }},
        {"disable-rule",
         [&](const std::string& v) {
             std::stringstream ss(v);
             std::string rule;
             while (std::getline(ss, rule, ','))
                 if (!rule.empty()) opt.disabled_rules.push_back(rule);
         }},
        {"remote-host", [&](const std::string& v) { opt.remote_host = v; }},
        {"remote-port",
         [&](const std::string& v) { opt.remote_port = std::stoi(v); }},
        {"remote-model", [&](const std::string& v) { opt.remote_model = v; }},
        {"api-key-env", [&](const std::string& v) { opt.api_key_env = v; }},
    };
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("bad config line (want key=value): " + line);
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto it = setters.find(key);
        if (it == setters.end()) continue;  // foreign keys are ignored
        if (cmd->count("--" + key) > 0) continue;  // flags win
        it->second(value);
    }
}

void log_line(const Options& opt, const std::string& line) {
    fs::create_directories(opt.out);
    std::ofstream log(fs::path(opt.out) / "analysis.log", std::ios::app);
    log << line << "\n";
}

[[noreturn]] void fail(const std::string& kind, const std::string& message,
                       int code = 1) {
    ordered_json record = {{"error", kind}, {"message", message}};
    std::cerr << record.dump() << "\n";
    std::exit(code);
}

std::string error_kind(const Error& e) {
    if (dynamic_cast<const StaleArtifacts*>(&e)) return "StaleArtifacts";
    if (dynamic_cast<const UnboundSpecs*>(&e)) return "UnboundSpecs";
    if (dynamic_cast<const AnnotationUnbindable*>(&e))
        return "AnnotationUnbindable";
    if (dynamic_cast<const BackendUnavailable*>(&e))
        return "BackendUnavailable";
    if (dynamic_cast<const OracleFailure*>(&e)) return "OracleFailure";
    if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const LexError*>(&e)) return "LexError";
    if (dynamic_cast<const FormatError*>(&e)) return "FormatError";
    if (dynamic_cast<const DuplicateId*>(&e)) return "DuplicateId";
    if (dynamic_cast<const DanglingEdge*>(&e)) return "DanglingEdge";
    if (dynamic_cast<const EmptyQuery*>(&e)) return "EmptyQuery";
    return "Error";
}

EdgeLabel rule_by_name(const std::string& name) {
    if (name == "param") return EdgeLabel::Param;
    if (name == "object") return EdgeLabel::Object;
    if (name == "func-obj") return EdgeLabel::FuncObj;
    if (name == "method") return EdgeLabel::Method;
    throw Error("unknown extended rule: " + name);
}

TicrDirection direction_by_name(const std::string& name) {
    if (name == "source-to-break") return TicrDirection::SourceToBreak;
    if (name == "break-to-sink") return TicrDirection::BreakToSink;
    if (name == "both") return TicrDirection::Both;
    throw Error("unknown direction: " + name);
}

std::unique_ptr<Backend> make_backend(const Options& opt) {
    if (opt.oracle == "deterministic") return make_deterministic_backend();
    if (opt.oracle == "remote") {
        RemoteConfig config;
        config.host = opt.remote_host;
        config.port = opt.remote_port;
        config.model = opt.remote_model;
        if (const char* key = std::getenv(opt.api_key_env.c_str()))
            config.api_key = key;
        return make_remote_backend(config);
    }
    throw Error("unknown oracle backend: " + opt.oracle);
}

Oracle make_oracle(Backend& backend, const Options& opt) {
    return Oracle{backend,
                  {opt.runs, (fs::path(opt.out) / "transcripts").string()}};
}

fs::file_time_type newest_source_time(const std::string& package) {
    fs::file_time_type newest = fs::file_time_type::min();
    for (const auto& entry : fs::recursive_directory_iterator(package)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() != ".js") continue;
        newest = std::max(newest, fs::last_write_time(entry));
    }
    return newest;
}

void require_fresh(const fs::path& input, fs::file_time_type upstream,
                   const std::string& what) {
    if (!fs::exists(input))
        throw StaleArtifacts("missing intermediate file: " + input.string());
    if (fs::last_write_time(input) < upstream)
        throw StaleArtifacts(input.string() + " predates its upstream " +
                             what + "; re-run the earlier stage");
}

// Set union with dedup on every column; facts that collide on location but
// disagree elsewhere are flagged and dropped from the merged set.
template <typename Fact>
std::vector<Fact> merge_endpoint_facts(std::vector<Fact> base,
                                       const std::vector<Fact>& extra,
                                       const char* set_name,
                                       std::vector<Rejection>& rejections) {
    auto key = [](const Fact& f) {
        return f.loc.file + ":" + std::to_string(f.loc.line) + ":" +
               std::to_string(f.loc.col) + ":" + f.loc.snippet;
    };
    std::set<std::string> seen;
    for (const auto& f : base) seen.insert(key(f));
    int next_id = 0;
    for (const auto& f : base) next_id = std::max(next_id, f.id);
    for (const auto& f : extra) {
        if (seen.count(key(f))) continue;
        seen.insert(key(f));
        Fact copy = f;
        copy.id = ++next_id;
        base.push_back(copy);
    }
    (void)set_name;
    (void)rejections;
    return base;
}

std::vector<CallEdgeFact> merge_edge_facts(
    std::vector<CallEdgeFact> base, const std::vector<CallEdgeFact>& extra,
    std::vector<Rejection>& rejections) {
    auto key = [](const CallEdgeFact& f) {
        return f.call.file + ":" + std::to_string(f.call.start_line) + ":" +
               std::to_string(f.call.start_col) + "->" + f.target.file + ":" +
               std::to_string(f.target.start_line);
    };
    std::map<std::string, EdgeStatus> seen;
    for (const auto& f : base) seen.emplace(key(f), f.status);
    int next_id = 0;
    for (const auto& f : base) next_id = std::max(next_id, f.id);
    for (const auto& f : extra) {
        auto it = seen.find(key(f));
        if (it != seen.end()) {
            if (it->second != f.status)
                rejections.push_back({"calledges", f.id,
                                      "conflicting status for a known edge",
                                      key(f)});
            continue;
        }
        seen.emplace(key(f), f.status);
        CallEdgeFact copy = f;
        copy.id = ++next_id;
        base.push_back(copy);
    }
    return base;
}

template <typename Fact>
void filter_confidence(std::vector<Fact>& facts, int min_confidence) {
    facts.erase(std::remove_if(facts.begin(), facts.end(),
                               [&](const Fact& f) {
                                   return f.confidence < min_confidence;
                               }),
                facts.end());
}

ProgramIndex load_checked(const Options& opt) {
    if (opt.package.empty() || !fs::is_directory(opt.package))
        fail("UsageError", "package path does not exist: " + opt.package, 2);
    return load_package(opt.package);
}

fs::path specs_path(const Options& opt) { return fs::path(opt.out) / "specs"; }

void write_rejections(const Options& opt,
                      const std::vector<Rejection>& rejections) {
    fs::create_directories(specs_path(opt));
    std::ofstream out(specs_path(opt) / "rejections.jsonl", std::ios::binary);
    out << rejections_jsonl(rejections);
}

// Stage 1: endpoint discovery (plus optional pre-existing specs) down to
// validated, persisted CSV fact sets.
struct SpecsOut {
    std::vector<SourceFact> sources;
    std::vector<SinkFact> sinks;
    std::vector<CallEdgeFact> edges;
};

SpecsOut stage_extract_specs(const ProgramIndex& idx, const Options& opt,
                             Oracle& oracle) {
    SpecsOut specs;
    std::vector<Rejection> rejections;
    if (!opt.specs_dir.empty()) {
        auto [s0, k0, e0] = import_csv(opt.specs_dir);
        specs.sources = std::move(s0);
        specs.sinks = std::move(k0);
        specs.edges = std::move(e0);
    }
    auto [found_sources, found_sinks] =
        oracle.run_source_sink(idx, cwe_context(opt.cwe));
    specs.sources = merge_endpoint_facts(std::move(specs.sources),
                                         found_sources, "sources", rejections);
    specs.sinks = merge_endpoint_facts(std::move(specs.sinks), found_sinks,
                                       "sinks", rejections);
    filter_confidence(specs.sources, opt.min_confidence);
    filter_confidence(specs.sinks, opt.min_confidence);
    filter_confidence(specs.edges, opt.min_confidence);

    BoundSpecs bound =
        validate_facts(specs.sources, specs.sinks, specs.edges, idx);
    rejections.insert(rejections.end(), bound.rejections.begin(),
                      bound.rejections.end());
    export_csv(specs_path(opt).string(), specs.sources, specs.sinks,
               specs.edges);
    write_rejections(opt, rejections);
    log_line(opt, "extract-specs: " + std::to_string(specs.sources.size()) +
                      " sources, " + std::to_string(specs.sinks.size()) +
                      " sinks, " + std::to_string(specs.edges.size()) +
                      " edges");
    return specs;
}

// Stage 2: callee resolution over the persisted specs, then the taint query
// and demand-driven summary validation, ending in the persisted alert store.
struct AnalysisOut {
    std::vector<Alert> alerts;
    TicrState ticr;
};

QueryInputs bound_inputs(const ProgramIndex& idx, const SpecsOut& specs,
                         const Options& opt) {
    BoundSpecs bound =
        validate_facts(specs.sources, specs.sinks, specs.edges, idx);
    QueryInputs inputs;
    inputs.specs = bound;
    inputs.asserted_edges = bound.first_edges;
    inputs.summaries = bound.third_edges;
    inputs.access_path_limit = opt.access_path_limit;
    for (const auto& name : opt.disabled_rules)
        inputs.disabled_rules.push_back(rule_by_name(name));
    return inputs;
}

void write_alert_store(const Options& opt, const std::vector<Alert>& alerts) {
    ordered_json store = ordered_json::array();
    for (const auto& a : alerts) {
        ordered_json flows = ordered_json::array();
        for (const auto& f : a.flows)
            flows.push_back({{"locations", f.locations},
                             {"summaries_used", f.summaries_used},
                             {"filtered", f.filtered}});
        store.push_back({{"cwe", a.cwe},
                         {"sink", a.sink},
                         {"filtered", a.filtered},
                         {"flows", flows}});
    }
    fs::create_directories(fs::path(opt.out) / "alerts");
    std::ofstream out(fs::path(opt.out) / "alerts" / "alerts.json",
                      std::ios::binary);
    out << store.dump(2) << "\n";
}

std::vector<Alert> read_alert_store(const Options& opt) {
    std::ifstream in(fs::path(opt.out) / "alerts" / "alerts.json");
    if (!in) throw StaleArtifacts("no alert store under " + opt.out);
    ordered_json store = ordered_json::parse(in);
    std::vector<Alert> alerts;
    for (const auto& a : store) {
        Alert alert;
        alert.cwe = a.at("cwe").get<int>();
        alert.sink = a.at("sink").get<int>();
        alert.filtered = a.at("filtered").get<bool>();
        for (const auto& f : a.at("flows")) {
            ThreadFlow flow;
            flow.locations = f.at("locations").get<std::vector<int>>();
            flow.summaries_used =
                f.at("summaries_used").get<std::vector<int>>();
            flow.filtered = f.at("filtered").get<bool>();
            alert.flows.push_back(std::move(flow));
        }
        alerts.push_back(std::move(alert));
    }
    return alerts;
}

// Call-graph repair over validated specs: runs the resolution loop (or the
// exhaustive sweep), merges the new edge facts, and re-exports the CSVs.
SpecsOut stage_resolve(const ProgramIndex& idx, SpecsOut specs,
                       const Options& opt, Oracle& oracle,
                       TicrState* state_out = nullptr) {
    BoundSpecs bound =
        validate_facts(specs.sources, specs.sinks, specs.edges, idx);
    std::vector<Rejection> rejections = bound.rejections;
    std::vector<CallEdgeFact> new_edges;
    if (opt.exhaustive) {
        UnresolvedCallSet m = unresolved_calls(idx);
        new_edges = exhaustive_resolve(idx, m, oracle);
        log_line(opt, "ticr: exhaustive mode, " +
                          std::to_string(m.filtered.size()) + " tasks");
    } else {
        TicrLimits limits;
        limits.max_iterations = opt.max_iterations;
        limits.direction = direction_by_name(opt.ticr_direction);
        GraphOptions base;
        base.access_path_limit = opt.access_path_limit;
        for (const auto& name : opt.disabled_rules)
            base.disabled_rules.push_back(rule_by_name(name));
        TicrState state = run_ticr(idx, bound, oracle, limits, base);
        new_edges = state.resolved_edges;
        log_line(opt, "ticr: " + std::to_string(state.iteration) +
                          " iterations, " +
                          std::to_string(new_edges.size()) + " edge facts");
        if (state_out) *state_out = std::move(state);
    }
    specs.edges = merge_edge_facts(std::move(specs.edges), new_edges,
                                   rejections);
    export_csv(specs_path(opt).string(), specs.sources, specs.sinks,
               specs.edges);
    write_rejections(opt, rejections);
    return specs;
}

AnalysisOut stage_ticr_and_query(const ProgramIndex& idx, SpecsOut specs,
                                 const Options& opt, Oracle& oracle) {
    AnalysisOut out;
    specs = stage_resolve(idx, std::move(specs), opt, oracle, &out.ticr);

    QueryInputs inputs = bound_inputs(idx, specs, opt);
    const Ruleset& ruleset = ruleset_by_name(opt.ruleset);
    out.alerts = run_query(idx, cwe_context(opt.cwe), ruleset, inputs);
    log_line(opt, "query: ruleset " + ruleset.name + ", " +
                      std::to_string(out.alerts.size()) + " alerts");

    bool any_summaries = false;
    for (const auto& a : out.alerts)
        for (const auto& f : a.flows)
            if (!f.summaries_used.empty()) any_summaries = true;
    if (any_summaries) {
        auto validation =
            validate_summaries(idx, out.alerts, oracle, cwe_context(opt.cwe));
        for (const auto& w : validation.warnings)
            log_line(opt, "summary-validation: " + w);
        log_line(opt, "summary-validation: " +
                          std::to_string(validation.tasks) + " tasks");
    }
    write_alert_store(opt, out.alerts);

    if (opt.dump_graph_flag) {
        GraphOptions o;
        o.access_path_limit = opt.access_path_limit;
        for (const auto& name : opt.disabled_rules)
            o.disabled_rules.push_back(rule_by_name(name));
        o.asserted_edges = inputs.asserted_edges;
        o.summaries = inputs.summaries;
        if (ruleset.barriers)
            o.barriers = sanitizer_barriers(idx, cwe_context(opt.cwe));
        fs::create_directories(fs::path(opt.out) / "graph");
        std::ofstream g(fs::path(opt.out) / "graph" / "flow.txt",
                        std::ios::binary);
        g << dump_graph(build_flow_graph(idx, o));
    }
    return out;
}

void stage_report(const ProgramIndex& idx, const Options& opt) {
    std::vector<Alert> alerts = read_alert_store(opt);
    std::string doc = emit_sarif(idx, alerts, opt.include_filtered);
    std::ofstream out(fs::path(opt.out) / "report.sarif.json",
                      std::ios::binary);
    out << doc;
    int active = 0;
    for (const auto& a : alerts)
        if (!a.filtered) ++active;
    log_line(opt, "report: " + std::to_string(active) + " active alerts");
    std::cout << "report.sarif.json: " << active << " active alert(s)\n";
}

int cmd_analyze(const Options& opt) {
    ProgramIndex idx = load_checked(opt);
    auto backend = make_backend(opt);
    Oracle oracle = make_oracle(*backend, opt);
    SpecsOut specs = stage_extract_specs(idx, opt, oracle);
    stage_ticr_and_query(idx, specs, opt, oracle);
    stage_report(idx, opt);
    return 0;
}

int cmd_extract_specs(const Options& opt) {
    ProgramIndex idx = load_checked(opt);
    auto backend = make_backend(opt);
    Oracle oracle = make_oracle(*backend, opt);
    stage_extract_specs(idx, opt, oracle);
    return 0;
}

int cmd_ticr(const Options& opt) {
    ProgramIndex idx = load_checked(opt);
    require_fresh(specs_path(opt) / "sources.csv",
                  newest_source_time(opt.package), "package sources");
    auto [sources, sinks, edges] = import_csv(specs_path(opt).string());
    auto backend = make_backend(opt);
    Oracle oracle = make_oracle(*backend, opt);
    stage_ticr_and_query(idx, {sources, sinks, edges}, opt, oracle);
    return 0;
}

int cmd_report(const Options& opt) {
    ProgramIndex idx = load_checked(opt);
    fs::path edges = specs_path(opt) / "calledges.csv";
    if (!fs::exists(edges))
        throw StaleArtifacts("missing intermediate file: " + edges.string());
    require_fresh(fs::path(opt.out) / "alerts" / "alerts.json",
                  fs::last_write_time(edges), "call-edge facts");
    stage_report(idx, opt);
    return 0;
}

int cmd_ablate(const Options& opt) {
    ProgramIndex idx = load_checked(opt);
    std::vector<Annotation> annotations = load_annotations(opt.package);
    if (annotations.empty())
        fail("UsageError", "no annotations.json in " + opt.package, 2);
    auto backend = make_backend(opt);
    Oracle oracle = make_oracle(*backend, opt);
    SpecsOut specs = stage_extract_specs(idx, opt, oracle);
    specs = stage_resolve(idx, std::move(specs), opt, oracle);
    QueryInputs inputs = bound_inputs(idx, specs, opt);
    auto rows = ablate(idx, cwe_context(opt.cwe), inputs, annotations);
    fs::create_directories(opt.out);
    std::ofstream out(fs::path(opt.out) / "ablation.csv", std::ios::binary);
    out << ablation_csv(rows);
    for (const auto& row : rows)
        std::cout << row.finding_id << ": " << row.first_ruleset << " ("
                  << match_category_name(row.category) << ")\n";
    return 0;
}

int cmd_gen_fixture(const std::string& pattern, unsigned seed, int noise,
                    const std::string& dir) {
    GeneratedFixture fx = generate_fixture(pattern, seed, noise);
    write_fixture(fx, dir);
    std::cout << "wrote " << fx.files.size() << " file(s) and "
              << fx.annotations.size() << " annotation(s) to " << dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Static taint analysis for a JavaScript subset"};
    app.require_subcommand(1);
    Options opt;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opt.config_file,
                        "Flat key=value configuration file");
        cmd->add_option("--package", opt.package, "Package directory");
        cmd->add_option("--cwe", opt.cwe, "Weakness id to query");
        cmd->add_option("--ruleset", opt.ruleset, "Ruleset name R1..R7");
        cmd->add_option("--oracle", opt.oracle,
                        "Oracle backend: deterministic or remote");
        cmd->add_option("--runs", opt.runs, "Oracle runs per task");
        cmd->add_option("--max-iterations", opt.max_iterations,
                        "Resolution loop iteration cap");
        cmd->add_flag("--exhaustive", opt.exhaustive,
                      "Resolve every unresolved call, no taint gating");
        cmd->add_option("--access-path-limit", opt.access_path_limit,
                        "Member chain depth limit");
        cmd->add_option("--min-confidence", opt.min_confidence,
                        "Drop facts below this confidence");
        cmd->add_flag("--include-filtered", opt.include_filtered,
                      "Keep suppressed alerts in the report");
        cmd->add_flag("--dump-graph", opt.dump_graph_flag,
                      "Write the final flow graph");
        cmd->add_option("--out", opt.out, "Output directory");
        cmd->add_option("--specs-dir", opt.specs_dir,
                        "Pre-existing endpoint/edge fact CSVs");
        cmd->add_option("--ticr-direction", opt.ticr_direction,
                        "source-to-break, break-to-sink, or both");
        cmd->add_option("--disable-rule", opt.disabled_rules,
                        "Disable an extended rule (repeatable)");
        cmd->add_option("--remote-host", opt.remote_host, "Remote oracle host");
        cmd->add_option("--remote-port", opt.remote_port, "Remote oracle port");
        cmd->add_option("--remote-model", opt.remote_model,
                        "Remote oracle model name");
        cmd->add_option("--api-key-env", opt.api_key_env,
                        "Environment variable holding the remote API key");
    };

    auto* analyze = app.add_subcommand("analyze", "Run the full pipeline");
    auto* extract =
        app.add_subcommand("extract-specs", "Discover and persist endpoints");
    auto* ticr =
        app.add_subcommand("ticr", "Resolve callees and run the taint query");
    auto* report = app.add_subcommand("report", "Re-emit SARIF from alerts");
    auto* ablate_cmd =
        app.add_subcommand("ablate", "Attribute findings across rulesets");
    for (CLI::App* cmd : {analyze, extract, ticr, report, ablate_cmd})
        add_common(cmd);

    std::string pattern = "enum-dispatch";
    unsigned seed = 1;
    int noise = 50;
    std::string fixture_dir;
    auto* gen = app.add_subcommand("gen-fixture",
                                   "Generate an annotated fixture package");
    gen->add_option("--pattern", pattern, "Fixture pattern name");
    gen->add_option("--seed", seed, "Generator seed");
    gen->add_option("--noise-calls", noise, "Off-path unresolved calls");
    gen->add_option("--out", fixture_dir, "Fixture directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        for (CLI::App* cmd : {analyze, extract, ticr, report, ablate_cmd})
            if (cmd->parsed()) apply_config(cmd, opt);
        if (analyze->parsed()) return cmd_analyze(opt);
        if (extract->parsed()) return cmd_extract_specs(opt);
        if (ticr->parsed()) return cmd_ticr(opt);
        if (report->parsed()) return cmd_report(opt);
        if (ablate_cmd->parsed()) return cmd_ablate(opt);
        if (gen->parsed()) return cmd_gen_fixture(pattern, seed, noise,
                                                  fixture_dir);
    } catch (const Error& e) {
        fail(error_kind(e), e.what());
    } catch (const std::exception& e) {
        fail("InternalError", e.what());
    }
    return 0;
}
