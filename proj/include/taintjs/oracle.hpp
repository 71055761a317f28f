#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "taintjs/cwe.hpp"
#include "taintjs/facts.hpp"
#include "taintjs/flowgraph.hpp"
#include "taintjs/index.hpp"

namespace taintjs {

// --- per-run proposal shapes ---

struct EndpointProposal {
    EndpointLocation loc;
    int confidence = 0;
    std::string reason;
};

struct DiscoveryRun {
    std::vector<EndpointProposal> sources;
    std::vector<EndpointProposal> sinks;
    bool failed = false;
};

enum class ResolutionVerdict { First, Third, Unresolvable };

const char* resolution_verdict_name(ResolutionVerdict v);

struct FpCandidate {
    int function_index = -1;  // FunctionEntry::index
    std::vector<std::string> trace;
    int confidence = 0;
};

struct TpMetadata {
    std::string library;
    std::string module_path;
    std::string import_statement;
};

struct ResolutionRun {
    ResolutionVerdict verdict = ResolutionVerdict::Unresolvable;
    std::vector<FpCandidate> fp_candidates;
    std::optional<TpMetadata> tp_metadata;
    std::string reason;
    bool failed = false;
};

struct ResolutionResult {
    ResolutionVerdict verdict = ResolutionVerdict::Unresolvable;
    std::vector<FpCandidate> fp_candidates;  // union across majority runs
    std::optional<TpMetadata> tp_metadata;
    std::string reason;
};

enum class SummaryClass { Propagates, Sanitizes, Unknown };

const char* summary_class_name(SummaryClass c);

struct SummaryRun {
    SummaryClass classification = SummaryClass::Unknown;
    int confidence = 0;
    std::vector<std::string> trace;
    bool failed = false;
};

struct SummaryVerdict {
    int edge_id = 0;
    SummaryClass classification = SummaryClass::Unknown;
    int confidence = 0;
    std::vector<std::string> trace;
    std::vector<SummaryClass> run_verdicts;
};

// --- tasks ---

struct ResolutionTask {
    int invocation_node = -1;
    std::string task_id;
};

struct SummaryTask {
    int edge_id = 0;
    int invocation_node = -1;
    std::string library;  // specifier from the import witness, may be empty
    std::string task_id;
};

// --- transcripts ---

struct ToolCallRecord {
    std::string tool;
    std::string arguments;  // JSON text
    std::string result;     // JSON or plain text
};

struct Transcript {
    std::string role;  // "source-sink" | "callgraph" | "flowsummary"
    std::string task_id;
    int run = 0;
    std::vector<ToolCallRecord> tool_calls;
    std::string proposals;  // JSON rendering of the run's output
    long long wall_ms = 0;
    long long tokens = 0;
    bool failed = false;
};

// --- backend interface ---

struct Backend {
    virtual ~Backend() = default;
    virtual DiscoveryRun discover(const ProgramIndex& index,
                                  const CweContext& cwe, int run,
                                  Transcript& transcript) = 0;
    virtual ResolutionRun resolve(const ProgramIndex& index,
                                  const ResolutionTask& task, int run,
                                  Transcript& transcript) = 0;
    virtual SummaryRun summarize(const ProgramIndex& index,
                                 const SummaryTask& task, const CweContext& cwe,
                                 int run, Transcript& transcript) = 0;
};

// Offline rule-based stand-in; a pure function of (package bytes, task).
std::unique_ptr<Backend> make_deterministic_backend();

// --- aggregation (pure folds over completed runs) ---

// Location-identity union keyed on file:line:snippet, max confidence kept.
// Output ordered by (file, line, col, snippet); ids assigned from 1.
std::vector<EndpointFact> aggregate_union(
    const std::vector<std::vector<EndpointProposal>>& runs);

// Majority vote over verdicts, ties toward unresolvable; fp candidates are
// the union (by function index, max confidence) across majority-side runs.
ResolutionResult aggregate_stratified(const std::vector<ResolutionRun>& runs);

// Majority over classifications; ties broken by mean confidence, then
// conservatively (propagates before unknown before sanitizes).
SummaryVerdict aggregate_summary(int edge_id,
                                 const std::vector<SummaryRun>& runs);

// --- the multi-run driver ---

struct OracleConfig {
    int runs = 3;
    std::string transcript_dir;  // empty = do not persist
};

struct Oracle {
    Backend& backend;
    OracleConfig config;

    std::pair<std::vector<SourceFact>, std::vector<SinkFact>> run_source_sink(
        const ProgramIndex& index, const CweContext& cwe);
    ResolutionResult run_callgraph(const ProgramIndex& index,
                                   const ResolutionTask& task);
    std::vector<SummaryVerdict> run_flowsummary(
        const ProgramIndex& index, const std::vector<SummaryTask>& tasks,
        const CweContext& cwe);
};

// --- toolbelt: read-only browsing surface shared by backends ---

// Paths are namespaced: "source/<pkg path>", "npm/<node_modules path>",
// "builtin/<catalog>".
struct Toolbelt {
    const ProgramIndex& index;

    explicit Toolbelt(const ProgramIndex& idx) : index(idx) {}

    // File content (optionally a 1-based line range). Throws Error on
    // unknown paths.
    std::string view_src(const std::string& path, int from_line = 0,
                         int to_line = 0) const;
    // Newline-separated listing of one directory level.
    std::string view_dir(const std::string& path) const;
    // "path:line:text" hits across all indexed files.
    std::vector<std::string> find_string(const std::string& needle) const;
};

// The bundled stub list of browser/global names exposed read-only under the
// builtin namespace.
const std::vector<std::pair<std::string, std::string>>& builtin_catalog();

// Per-role confidence rubric text embedded into prompts and docs.
std::string confidence_rubric(const std::string& role);

}  // namespace taintjs
