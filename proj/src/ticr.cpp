#include "taintjs/ticr.hpp"

#include <algorithm>
#include <set>

namespace taintjs {

namespace {

SpanLocation span_location_of(const FlowNode& n) {
    return {n.file, n.span.start_line, n.span.start_col, n.span.end_line,
            n.span.end_col};
}

std::string task_id_for(const FlowNode& n) {
    return "resolve-" + n.file + ":" + std::to_string(n.span.start_line) +
           ":" + std::to_string(n.span.start_col);
}

// Shared per-call handler; returns true when the call produced an edge or a
// summary (as opposed to joining the ignored set).
bool process_call(const ProgramIndex& index, Oracle& oracle, int call,
                  TicrState& state, int& next_fact_id,
                  TicrIterationReport& report) {
    const FlowNode& node = index.node(call);
    ResolutionResult result;
    try {
        result = oracle.run_callgraph(index, {call, task_id_for(node)});
    } catch (const OracleFailure&) {
        state.ignored.push_back(call);
        ++report.ignored;
        return false;
    }
    if (result.verdict == ResolutionVerdict::First &&
        !result.fp_candidates.empty()) {
        for (const auto& fp : result.fp_candidates) {
            const FunctionEntry& fe = index.functions[fp.function_index];
            int fn_node = index.id_of(fe.ast);
            state.asserted_edges.emplace_back(call, fn_node);
            CallEdgeFact fact;
            fact.id = next_fact_id++;
            fact.call = span_location_of(node);
            fact.target = span_location_of(index.node(fn_node));
            fact.kind = EdgeKind::First;
            fact.confidence = fp.confidence;
            state.resolved_edges.push_back(std::move(fact));
        }
        ++report.resolved_first;
        return true;
    }
    if (result.verdict == ResolutionVerdict::Third) {
        state.summaries.push_back(call);
        CallEdgeFact fact;
        fact.id = next_fact_id++;
        fact.call = span_location_of(node);
        fact.target = SpanLocation::sentinel();
        fact.kind = EdgeKind::Third;
        fact.confidence = 4;
        state.resolved_edges.push_back(std::move(fact));
        ++report.third_party;
        return true;
    }
    state.ignored.push_back(call);
    ++report.ignored;
    return false;
}

}  // namespace

CandidateSets select_candidates(const ProgramIndex& index,
                                const UnresolvedCallSet& m,
                                const std::vector<int>& sources,
                                const std::vector<int>& sinks,
                                const FlowGraph& graph) {
    CandidateSets out;
    std::vector<int> from_sources = reachable(graph, sources, Direction::Forward);
    std::vector<int> to_sinks = reachable(graph, sinks, Direction::Backward);
    std::set<int> fwd(from_sources.begin(), from_sources.end());
    std::set<int> bwd(to_sinks.begin(), to_sinks.end());
    // Taint flows into a call when the call node itself, one of its
    // arguments, or its receiver expression is forward-reachable.
    auto taint_enters = [&](int call) {
        if (fwd.count(call)) return true;
        const InvocationEntry* inv = index.invocation_at(call);
        if (!inv) return false;
        for (int a : inv->args)
            if (fwd.count(a)) return true;
        const AstNode* callee = inv->ast->children[0].get();
        if (callee->kind == NodeKind::Member ||
            callee->kind == NodeKind::ComputedMember)
            return fwd.count(index.id_of(callee->children[0].get())) > 0;
        return false;
    };
    for (int call : m.filtered) {
        bool forward = taint_enters(call);
        if (forward) out.src_to_brk.push_back(call);
        if (bwd.count(call)) out.brk_to_snk.push_back(call);
        if (forward || bwd.count(call)) out.combined.push_back(call);
    }
    return out;
}

TicrState run_ticr(const ProgramIndex& index, const BoundSpecs& specs,
                   Oracle& oracle, const TicrLimits& limits,
                   const GraphOptions& base) {
    TicrState state;
    if (specs.sources.empty() && specs.sinks.empty()) return state;

    state.asserted_edges = specs.first_edges;
    state.summaries = specs.third_edges;
    std::set<int> processed;  // calls with an edge, a summary, or ignored
    for (const auto& [call, fn] : specs.first_edges) processed.insert(call);
    for (int call : specs.third_edges) processed.insert(call);

    UnresolvedCallSet m = unresolved_calls(index);
    int next_fact_id = 1;

    while (state.iteration < limits.max_iterations) {
        GraphOptions options = base;
        options.extended = true;
        options.asserted_edges = state.asserted_edges;
        options.summaries = state.summaries;
        FlowGraph graph = build_flow_graph(index, options);
        CandidateSets sets =
            select_candidates(index, m, specs.sources, specs.sinks, graph);
        const std::vector<int>& pool =
            limits.direction == TicrDirection::SourceToBreak ? sets.src_to_brk
            : limits.direction == TicrDirection::BreakToSink ? sets.brk_to_snk
                                                             : sets.combined;
        std::vector<int> fresh;
        for (int call : pool)
            if (!processed.count(call)) fresh.push_back(call);
        if (fresh.empty()) break;

        ++state.iteration;
        state.candidates_history.push_back(fresh);
        TicrIterationReport report;
        report.iteration = state.iteration;
        report.candidates = static_cast<int>(fresh.size());
        for (int call : fresh) {
            processed.insert(call);
            const InvocationEntry* inv = index.invocation_at(call);
            if (inv && inv->boundary_hint == Boundary::Third) {
                // Auto-classified by the import witness; no oracle task.
                state.summaries.push_back(call);
                CallEdgeFact fact;
                fact.id = next_fact_id++;
                fact.call = span_location_of(index.node(call));
                fact.target = SpanLocation::sentinel();
                fact.kind = EdgeKind::Third;
                fact.confidence = 5;
                state.resolved_edges.push_back(std::move(fact));
                ++report.third_party;
                continue;
            }
            process_call(index, oracle, call, state, next_fact_id, report);
        }
        state.reports.push_back(report);
        std::sort(state.ignored.begin(), state.ignored.end());
    }
    return state;
}

std::vector<CallEdgeFact> exhaustive_resolve(const ProgramIndex& index,
                                             const UnresolvedCallSet& m,
                                             Oracle& oracle) {
    TicrState state;
    TicrIterationReport report;
    int next_fact_id = 1;
    for (int call : m.filtered)
        process_call(index, oracle, call, state, next_fact_id, report);
    return state.resolved_edges;
}

}  // namespace taintjs
