#include "taintjs/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace taintjs {

namespace {

std::string sanitize_filename(std::string s) {
    for (char& c : s)
        if (c == '/' || c == ':' || c == '\\' || c == ' ') c = '_';
    return s;
}

void persist_transcript(const OracleConfig& config, const Transcript& t) {
    if (config.transcript_dir.empty()) return;
    fs::create_directories(config.transcript_dir);
    nlohmann::ordered_json j;
    j["role"] = t.role;
    j["task_id"] = t.task_id;
    j["run"] = t.run;
    j["tool_calls"] = nlohmann::ordered_json::array();
    for (const auto& c : t.tool_calls) {
        nlohmann::ordered_json call;
        call["tool"] = c.tool;
        call["arguments"] = c.arguments;
        call["result"] = c.result;
        j["tool_calls"].push_back(call);
    }
    j["proposals"] = t.proposals;
    j["wall_ms"] = t.wall_ms;
    j["tokens"] = t.tokens;
    j["failed"] = t.failed;
    fs::path file = fs::path(config.transcript_dir) /
                    (sanitize_filename(t.role + "-" + t.task_id + "-run" +
                                       std::to_string(t.run)) +
                     ".json");
    std::ofstream(file, std::ios::binary) << j.dump(2) << "\n";
}

struct Timer {
    std::chrono::steady_clock::time_point begin =
        std::chrono::steady_clock::now();
    long long ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - begin)
            .count();
    }
};

}  // namespace

const char* resolution_verdict_name(ResolutionVerdict v) {
    switch (v) {
        case ResolutionVerdict::First: return "first";
        case ResolutionVerdict::Third: return "third";
        case ResolutionVerdict::Unresolvable: return "unresolvable";
    }
    return "?";
}

const char* summary_class_name(SummaryClass c) {
    switch (c) {
        case SummaryClass::Propagates: return "propagates";
        case SummaryClass::Sanitizes: return "sanitizes";
        case SummaryClass::Unknown: return "unknown";
    }
    return "?";
}

std::vector<EndpointFact> aggregate_union(
    const std::vector<std::vector<EndpointProposal>>& runs) {
    // Location identity: file:line:snippet (column retained from the first
    // occurrence; the key intentionally ignores it).
    std::map<std::tuple<std::string, int, std::string>, EndpointFact> grouped;
    for (const auto& run : runs) {
        for (const auto& p : run) {
            auto key = std::make_tuple(p.loc.file, p.loc.line, p.loc.snippet);
            auto it = grouped.find(key);
            if (it == grouped.end()) {
                EndpointFact f;
                f.loc = p.loc;
                f.confidence = p.confidence;
                grouped.emplace(key, std::move(f));
            } else {
                it->second.confidence =
                    std::max(it->second.confidence, p.confidence);
            }
        }
    }
    std::vector<EndpointFact> out;
    for (auto& [key, fact] : grouped) out.push_back(std::move(fact));
    std::sort(out.begin(), out.end(),
              [](const EndpointFact& a, const EndpointFact& b) {
                  return std::tie(a.loc.file, a.loc.line, a.loc.col,
                                  a.loc.snippet) <
                         std::tie(b.loc.file, b.loc.line, b.loc.col,
                                  b.loc.snippet);
              });
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i].id = static_cast<int>(i) + 1;
    return out;
}

ResolutionResult aggregate_stratified(const std::vector<ResolutionRun>& runs) {
    std::map<ResolutionVerdict, int> votes;
    int counted = 0;
    for (const auto& r : runs) {
        if (r.failed) continue;
        ++votes[r.verdict];
        ++counted;
    }
    ResolutionResult out;
    if (counted == 0) {
        out.reason = "no completed runs";
        return out;
    }
    int best = 0;
    bool unique = false;
    ResolutionVerdict winner = ResolutionVerdict::Unresolvable;
    for (const auto& [v, n] : votes) {
        if (n > best) {
            best = n;
            winner = v;
            unique = true;
        } else if (n == best) {
            unique = false;
        }
    }
    out.verdict = unique ? winner : ResolutionVerdict::Unresolvable;
    if (!unique) {
        out.reason = "no majority verdict";
        return out;
    }
    // Proposals come only from majority-side runs.
    std::map<int, FpCandidate> fps;
    for (const auto& r : runs) {
        if (r.failed || r.verdict != out.verdict) continue;
        if (out.reason.empty()) out.reason = r.reason;
        for (const auto& fp : r.fp_candidates) {
            auto it = fps.find(fp.function_index);
            if (it == fps.end())
                fps.emplace(fp.function_index, fp);
            else
                it->second.confidence =
                    std::max(it->second.confidence, fp.confidence);
        }
        if (out.verdict == ResolutionVerdict::Third && !out.tp_metadata)
            out.tp_metadata = r.tp_metadata;
    }
    for (auto& [index, fp] : fps) out.fp_candidates.push_back(std::move(fp));
    return out;
}

SummaryVerdict aggregate_summary(int edge_id,
                                 const std::vector<SummaryRun>& runs) {
    SummaryVerdict out;
    out.edge_id = edge_id;
    struct Tally {
        int count = 0;
        int confidence_sum = 0;
    };
    std::map<SummaryClass, Tally> tallies;
    for (const auto& r : runs) {
        if (r.failed) continue;
        out.run_verdicts.push_back(r.classification);
        tallies[r.classification].count += 1;
        tallies[r.classification].confidence_sum += r.confidence;
    }
    if (out.run_verdicts.empty()) {
        out.classification = SummaryClass::Unknown;
        return out;
    }
    auto rank = [&](SummaryClass c) {
        // Conservative preference on full ties: never prefer sanitizes.
        switch (c) {
            case SummaryClass::Propagates: return 0;
            case SummaryClass::Unknown: return 1;
            case SummaryClass::Sanitizes: return 2;
        }
        return 3;
    };
    SummaryClass best = SummaryClass::Unknown;
    double best_count = -1, best_mean = -1;
    for (const auto& [cls, t] : tallies) {
        double mean = static_cast<double>(t.confidence_sum) / t.count;
        bool better = t.count > best_count ||
                      (t.count == best_count && mean > best_mean) ||
                      (t.count == best_count && mean == best_mean &&
                       rank(cls) < rank(best));
        if (better) {
            best = cls;
            best_count = t.count;
            best_mean = mean;
        }
    }
    out.classification = best;
    const Tally& t = tallies[best];
    out.confidence = (t.confidence_sum + t.count / 2) / t.count;
    for (const auto& r : runs)
        if (!r.failed && r.classification == best && out.trace.empty())
            out.trace = r.trace;
    return out;
}

std::pair<std::vector<SourceFact>, std::vector<SinkFact>>
Oracle::run_source_sink(const ProgramIndex& index, const CweContext& cwe) {
    std::vector<std::vector<EndpointProposal>> source_runs, sink_runs;
    for (int run = 1; run <= config.runs; ++run) {
        Transcript t;
        t.role = "source-sink";
        t.task_id = "discovery-cwe" + std::to_string(cwe.id);
        t.run = run;
        Timer timer;
        DiscoveryRun result = backend.discover(index, cwe, run, t);
        t.wall_ms = timer.ms();
        t.failed = result.failed;
        persist_transcript(config, t);
        if (result.failed) continue;
        source_runs.push_back(std::move(result.sources));
        sink_runs.push_back(std::move(result.sinks));
    }
    return {aggregate_union(source_runs), aggregate_union(sink_runs)};
}

ResolutionResult Oracle::run_callgraph(const ProgramIndex& index,
                                       const ResolutionTask& task) {
    std::vector<ResolutionRun> runs;
    for (int run = 1; run <= config.runs; ++run) {
        Transcript t;
        t.role = "callgraph";
        t.task_id = task.task_id;
        t.run = run;
        Timer timer;
        ResolutionRun result = backend.resolve(index, task, run, t);
        t.wall_ms = timer.ms();
        t.failed = result.failed;
        persist_transcript(config, t);
        runs.push_back(std::move(result));
    }
    return aggregate_stratified(runs);
}

std::vector<SummaryVerdict> Oracle::run_flowsummary(
    const ProgramIndex& index, const std::vector<SummaryTask>& tasks,
    const CweContext& cwe) {
    if (config.runs % 2 == 0)
        throw Error("flow-summary validation requires an odd run count");
    std::vector<SummaryVerdict> out;
    for (const auto& task : tasks) {
        std::vector<SummaryRun> runs;
        for (int run = 1; run <= config.runs; ++run) {
            Transcript t;
            t.role = "flowsummary";
            t.task_id = task.task_id;
            t.run = run;
            Timer timer;
            SummaryRun result = backend.summarize(index, task, cwe, run, t);
            t.wall_ms = timer.ms();
            t.failed = result.failed;
            persist_transcript(config, t);
            runs.push_back(std::move(result));
        }
        out.push_back(aggregate_summary(task.edge_id, runs));
    }
    return out;
}

// --- toolbelt ---

namespace {

std::pair<std::string, std::string> split_namespace(const std::string& path) {
    auto slash = path.find('/');
    if (slash == std::string::npos) return {path, ""};
    return {path.substr(0, slash), path.substr(slash + 1)};
}

std::string read_disk_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("no such file: " + p.generic_string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string clip_lines(const std::string& text, int from_line, int to_line) {
    if (from_line <= 0) return text;
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (n < from_line) continue;
        if (to_line > 0 && n > to_line) break;
        out << line << "\n";
    }
    return out.str();
}

}  // namespace

std::string Toolbelt::view_src(const std::string& path, int from_line,
                               int to_line) const {
    auto [ns, rest] = split_namespace(path);
    if (ns == "source") {
        for (const auto& f : index.files)
            if (f.src.path == rest)
                return clip_lines(f.src.text, from_line, to_line);
        throw Error("no such file: " + path);
    }
    if (ns == "npm") {
        for (const auto& p : index.third_party_files)
            if (p == "node_modules/" + rest || p == rest)
                return clip_lines(
                    read_disk_file(fs::path(index.package_root) / p),
                    from_line, to_line);
        throw Error("no such file: " + path);
    }
    if (ns == "builtin") {
        for (const auto& [name, doc] : builtin_catalog())
            if (name == rest) return doc;
        throw Error("no such builtin: " + rest);
    }
    throw Error("unknown namespace: " + ns);
}

std::string Toolbelt::view_dir(const std::string& path) const {
    auto [ns, rest] = split_namespace(path);
    std::vector<std::string> entries;
    auto add_level = [&](const std::string& rel) {
        std::string prefix = rest.empty() ? "" : rest + "/";
        if (rel.rfind(prefix, 0) != 0) return;
        std::string tail = rel.substr(prefix.size());
        auto slash = tail.find('/');
        entries.push_back(slash == std::string::npos
                              ? tail
                              : tail.substr(0, slash) + "/");
    };
    if (ns == "source") {
        for (const auto& f : index.files) add_level(f.src.path);
    } else if (ns == "npm") {
        for (const auto& p : index.third_party_files) {
            std::string rel = p;
            const std::string nm = "node_modules/";
            if (rel.rfind(nm, 0) == 0) rel = rel.substr(nm.size());
            add_level(rel);
        }
    } else if (ns == "builtin") {
        for (const auto& [name, doc] : builtin_catalog()) entries.push_back(name);
    } else {
        throw Error("unknown namespace: " + ns);
    }
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
    std::string out;
    for (const auto& e : entries) {
        out += e;
        out += '\n';
    }
    return out;
}

std::vector<std::string> Toolbelt::find_string(
    const std::string& needle) const {
    std::vector<std::string> hits;
    auto scan = [&](const std::string& display, const std::string& text) {
        std::istringstream in(text);
        std::string line;
        int n = 0;
        while (std::getline(in, line)) {
            ++n;
            if (line.find(needle) != std::string::npos)
                hits.push_back(display + ":" + std::to_string(n) + ":" + line);
        }
    };
    for (const auto& f : index.files) scan("source/" + f.src.path, f.src.text);
    for (const auto& p : index.third_party_files) {
        fs::path disk = fs::path(index.package_root) / p;
        std::ifstream in(disk, std::ios::binary);
        if (!in) continue;
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string rel = p;
        const std::string nm = "node_modules/";
        if (rel.rfind(nm, 0) == 0) rel = rel.substr(nm.size());
        scan("npm/" + rel, buf.str());
    }
    return hits;
}

const std::vector<std::pair<std::string, std::string>>& builtin_catalog() {
    static const std::vector<std::pair<std::string, std::string>> entries = {
        {"window", "Global browser object; properties reachable from page scripts."},
        {"document", "DOM document; write() inserts markup directly into the page."},
        {"document.write", "Writes raw markup into the document; sink for markup injection."},
        {"document.cookie", "Cookie string; readable and writable by page scripts."},
        {"location", "Current page URL object."},
        {"location.hash", "URL fragment; attacker-controlled via crafted links."},
        {"location.search", "URL query string; attacker-controlled."},
        {"location.href", "Full URL; assignment navigates the page (redirect sink)."},
        {"navigator", "Browser metadata object."},
        {"innerHTML", "Element property; assignment parses markup (injection sink)."},
        {"outerHTML", "Element property; assignment replaces the node with markup."},
        {"insertAdjacentHTML", "Inserts markup relative to a node."},
        {"eval", "Evaluates a string as code; code-injection sink."},
        {"Function", "Constructor compiling a string into a function; code sink."},
        {"setTimeout", "Schedules a callback; string form evaluates code."},
        {"setInterval", "Schedules a repeating callback; string form evaluates code."},
        {"fetch", "Issues an HTTP request."},
        {"XMLHttpRequest", "Legacy HTTP request object."},
        {"localStorage", "Persistent key/value store readable by page scripts."},
        {"sessionStorage", "Session-scoped key/value store."},
        {"postMessage", "Cross-window messaging; message data is untrusted."},
        {"addEventListener", "Registers an event callback."},
        {"console", "Logging object."},
        {"JSON.parse", "Parses JSON text; value-preserving."},
        {"JSON.stringify", "Serializes to JSON text; value-preserving."},
        {"encodeURIComponent", "Percent-encodes a URI component."},
        {"decodeURIComponent", "Decodes a URI component; can reintroduce taint."},
        {"process", "Node process object."},
        {"process.argv", "Command-line arguments; externally controlled."},
        {"process.env", "Environment variables; externally controlled."},
        {"require", "Node module loader."},
        {"module.exports", "Node module export slot."},
        {"Buffer", "Node binary data container."},
        {"child_process.exec", "Runs a shell command string; command-injection sink."},
        {"child_process.execSync", "Synchronous shell command; command-injection sink."},
        {"child_process.spawn", "Starts a process with an argument vector."},
        {"fs.readFile", "Reads a file by path; path-traversal sink."},
        {"fs.readFileSync", "Synchronous file read; path-traversal sink."},
        {"fs.writeFile", "Writes a file by path; path-traversal sink."},
        {"fs.createReadStream", "Opens a read stream by path; path-traversal sink."},
        {"Object.assign", "Merges own properties onto a target object."},
        {"Object.entries", "Lists [key, value] pairs of an object."},
    };
    return entries;
}

std::string confidence_rubric(const std::string& role) {
    std::string common =
        "Confidence scale 1-5. Reserve 5 for zero-ambiguity cases where the "
        "evidence is explicit in the code you viewed. Use 4 when the "
        "conclusion follows from one short inference step, 3 when plausible "
        "readings disagree, 2 when you are mostly guessing from naming, and "
        "1 when the proposal is speculative.";
    if (role == "source-sink")
        return common +
               " For endpoints: 5 means the value is unambiguously "
               "external input (or unambiguously reaches the dangerous "
               "operation); lower scores reflect uncertainty about who "
               "controls the value.";
    if (role == "callgraph")
        return common +
               " For callees: 5 means an unambiguous trace from call site "
               "to definition; do not propose speculative targets - prefer "
               "unresolvable.";
    if (role == "flowsummary")
        return common +
               " For summaries: 5 means you followed the tainted value "
               "through the library entry point and saw it escape or be "
               "sanitized explicitly.";
    return common;
}

}  // namespace taintjs
