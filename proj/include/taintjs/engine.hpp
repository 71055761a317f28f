#pragma once

#include <string>
#include <vector>

#include "taintjs/cwe.hpp"
#include "taintjs/facts.hpp"
#include "taintjs/flowgraph.hpp"
#include "taintjs/oracle.hpp"

namespace taintjs {

enum class EndpointChoice { Base, Custom, Combined };

// One row of the seven-configuration evaluation table. R1 is the unmodified
// baseline: built-in endpoints, unrepaired call graph, barriers on.
struct Ruleset {
    std::string name;  // "R1".."R7"
    EndpointChoice endpoints = EndpointChoice::Base;
    bool enhanced_callgraph = false;
    bool barriers = true;
};

const std::vector<Ruleset>& ruleset_table();
// Throws Error on an unknown name.
const Ruleset& ruleset_by_name(const std::string& name);

struct ThreadFlow {
    std::vector<int> locations;      // node ids, source first, sink last
    std::vector<int> summaries_used; // candidate-summary invocation nodes
    bool filtered = false;
};

struct Alert {
    int cwe = 0;
    int sink = -1;  // node id; all flows end here
    std::vector<ThreadFlow> flows;
    bool filtered = false;
};

// Everything run_query needs beyond the ruleset: validated endpoint specs
// and the call-graph repairs accumulated by the resolution loop.
struct QueryInputs {
    BoundSpecs specs;
    std::vector<std::pair<int, int>> asserted_edges;
    std::vector<int> summaries;  // third-party invocation nodes
    int access_path_limit = 2;
    std::vector<EdgeLabel> disabled_rules;
};

struct BaseEndpoints {
    std::vector<int> sources;
    std::vector<int> sinks;
};

// The engine's built-in default endpoint catalog: environment reads as
// sources; per-weakness dangerous-callee arguments and markup assignments as
// sinks. Deliberately small.
BaseEndpoints base_endpoints(const ProgramIndex& index, const CweContext& cwe);

// Invocation nodes of calls whose callee name is in the per-weakness
// sanitizer catalog; applied as node barriers.
std::vector<int> sanitizer_barriers(const ProgramIndex& index,
                                    const CweContext& cwe);

// Taint query under one ruleset: endpoints chosen per the ruleset, graph
// built with the extended rules on and the repairs applied only when the
// ruleset uses the enhanced call graph, barrier nodes cut when enabled.
// Flows are shortest paths per (source, sink), at most 8 per sink. Throws
// UnboundSpecs when an enhanced ruleset has neither asserted edges nor
// summaries.
std::vector<Alert> run_query(const ProgramIndex& index, const CweContext& cwe,
                             const Ruleset& ruleset, const QueryInputs& inputs);

struct SummaryValidation {
    std::vector<SummaryVerdict> verdicts;
    int tasks = 0;  // oracle tasks issued (deduplicated candidate edges)
    std::vector<std::string> warnings;
};

// Demand-driven flow-summary validation: the deduplicated candidate-edge
// set across all thread flows goes to the oracle once; sanitizes verdicts
// filter every dependent flow and any alert left with no active flow.
// Oracle errors leave affected edges as propagates with a warning.
SummaryValidation validate_summaries(const ProgramIndex& index,
                                     std::vector<Alert>& alerts,
                                     Oracle& oracle, const CweContext& cwe);

struct Annotation {
    std::string finding_id;
    int cwe = 0;
    EndpointLocation source;
    EndpointLocation sink;
    std::string notes;
};

enum class MatchCategory { Exact, Extended, EquivalentReview, None };

const char* match_category_name(MatchCategory c);

// Grades one alert against a ground-truth annotation. Throws
// AnnotationUnbindable when either annotated location fails to bind.
MatchCategory match_ground_truth(const Alert& alert,
                                 const Annotation& annotation,
                                 const ProgramIndex& index);

struct AblationRow {
    std::string finding_id;
    std::string first_ruleset;  // "none" when undetected
    MatchCategory category = MatchCategory::None;
};

// Runs R1..R7 in order and attributes each annotation to the first ruleset
// whose active alerts match it exactly or extended. Enhanced rulesets with
// no repairs available contribute zero alerts rather than failing the
// sweep.
std::vector<AblationRow> ablate(const ProgramIndex& index,
                                const CweContext& cwe,
                                const QueryInputs& inputs,
                                const std::vector<Annotation>& annotations);

// SARIF-2.1.0-subset document; filtered alerts appear only when
// include_filtered is set, carrying a suppression marker.
std::string emit_sarif(const ProgramIndex& index,
                       const std::vector<Alert>& alerts,
                       bool include_filtered = false);

// One row per annotation: finding id, first-detecting ruleset, category.
std::string ablation_csv(const std::vector<AblationRow>& rows);

}  // namespace taintjs
