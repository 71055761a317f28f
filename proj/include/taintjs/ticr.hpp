#pragma once

#include <vector>

#include "taintjs/facts.hpp"
#include "taintjs/flowgraph.hpp"
#include "taintjs/oracle.hpp"

namespace taintjs {

// Which reachability seeds gate candidate selection.
enum class TicrDirection { SourceToBreak, BreakToSink, Both };

struct CandidateSets {
    std::vector<int> src_to_brk;  // unresolved calls taint reaches
    std::vector<int> brk_to_snk;  // unresolved calls that reach a sink
    std::vector<int> combined;    // their union, ascending
};

// Selection over a graph built with the extended rules enabled: a call is a
// candidate when a source flows into it, or when flow out of it reaches a
// sink.
CandidateSets select_candidates(const ProgramIndex& index,
                                const UnresolvedCallSet& m,
                                const std::vector<int>& sources,
                                const std::vector<int>& sinks,
                                const FlowGraph& graph);

struct TicrLimits {
    int max_iterations = 5;
    TicrDirection direction = TicrDirection::Both;
};

struct TicrIterationReport {
    int iteration = 0;
    int candidates = 0;
    int resolved_first = 0;
    int third_party = 0;
    int ignored = 0;
};

struct TicrState {
    int iteration = 0;  // graph-rebuild passes that produced new work
    std::vector<CallEdgeFact> resolved_edges;
    std::vector<int> ignored;  // invocation node ids, ascending
    std::vector<std::vector<int>> candidates_history;  // new work per pass
    // Graph inputs accumulated so far (includes the seeds from the specs).
    std::vector<std::pair<int, int>> asserted_edges;
    std::vector<int> summaries;  // third-party invocation node ids
    std::vector<TicrIterationReport> reports;
};

// The iterative repair loop: rebuild the graph with everything asserted so
// far, select candidates, consult the call-graph oracle for each new one
// (third-party boundary hints skip the oracle and become candidate summaries
// directly), and seed the next pass with the results. Unresolvable verdicts
// and oracle failures join the ignored set and are never re-queried.
// Returns immediately with an empty state when both seed sets are empty.
TicrState run_ticr(const ProgramIndex& index, const BoundSpecs& specs,
                   Oracle& oracle, const TicrLimits& limits = {},
                   const GraphOptions& base = {});

// One oracle task per unresolved call, single pass, no taint gating.
std::vector<CallEdgeFact> exhaustive_resolve(const ProgramIndex& index,
                                             const UnresolvedCallSet& m,
                                             Oracle& oracle);

}  // namespace taintjs
