#pragma once

#include <string>
#include <vector>

#include "taintjs/index.hpp"

namespace taintjs {

enum class EdgeLabel {
    Intra,
    CallArg,
    CallReturn,
    Param,
    Object,
    FuncObj,
    Method,
    AssertedEdge,
    CandidateSummary,
    SummaryInternal,
};

const char* edge_label_name(EdgeLabel l);

struct FlowEdge {
    int from = -1;
    int to = -1;
    EdgeLabel label = EdgeLabel::Intra;

    friend bool operator==(const FlowEdge& a, const FlowEdge& b) {
        return a.from == b.from && a.to == b.to && a.label == b.label;
    }
    friend bool operator<(const FlowEdge& a, const FlowEdge& b) {
        return std::tie(a.from, a.to, a.label) < std::tie(b.from, b.to, b.label);
    }
};

struct UnresolvedCallSet {
    std::vector<int> raw;       // invocation node ids, ascending
    std::vector<int> filtered;  // raw minus internal-summary-covered calls
};

struct GraphOptions {
    bool extended = true;
    // Individually disabled extended rules (Param/Object/FuncObj/Method).
    std::vector<EdgeLabel> disabled_rules;
    int access_path_limit = 2;
    // Bound first-party call-edge facts: (invocation node, function node).
    std::vector<std::pair<int, int>> asserted_edges;
    // Third-party invocation nodes whose candidate summary is enabled.
    std::vector<int> summaries;
    // Sanitizer invocation nodes: every edge touching one is dropped.
    std::vector<int> barriers;
};

struct FlowGraph {
    int node_count = 0;
    std::vector<FlowEdge> edges;               // sorted, unique
    std::vector<std::vector<int>> successors;  // adjacency, ascending
    std::vector<std::vector<int>> predecessors;
};

enum class Direction { Forward, Backward };

// Local, non-heuristic callee resolution: direct calls of visible function
// declarations, single-assignment const/let function bindings, dot-member
// calls on single-assignment object-literal bindings, and immediately
// invoked function expressions. Everything else is empty.
std::vector<const FunctionEntry*> resolve_callees_p0(
    const InvocationEntry& invocation, const ProgramIndex& index);

// True when the call matches the internal flow-summary catalog: the
// value-preserving string/array methods, JSON.stringify/JSON.parse, and the
// Object.assign/Object.entries intrinsics.
bool matches_summary_catalog(const InvocationEntry& invocation);

// raw: non-test invocations with no precision-0 callee; filtered: raw minus
// the summary catalog. require() is modeled as a module-system intrinsic and
// belongs to neither set.
UnresolvedCallSet unresolved_calls(const ProgramIndex& index);

// Throws DanglingEdge when an asserted edge references a missing node id.
FlowGraph build_flow_graph(const ProgramIndex& index,
                           const GraphOptions& options);

std::vector<int> reachable(const FlowGraph& graph, const std::vector<int>& seeds,
                           Direction direction);

// Shortest path from `from` to `to`; among equal-length paths the
// lexicographically smallest node-id sequence wins. Empty when unreachable.
std::vector<int> shortest_path(const FlowGraph& graph, int from, int to);

// One edge per line: from_id,to_id,label.
std::string dump_graph(const FlowGraph& graph);

}  // namespace taintjs
