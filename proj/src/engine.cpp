#include "taintjs/engine.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

namespace taintjs {

namespace {

std::string dotted_chain(const AstNode* expr) {
    std::vector<std::string> parts;
    while (true) {
        if (expr->kind == NodeKind::Member) {
            parts.push_back(expr->text);
            expr = expr->children[0].get();
        } else if (expr->kind == NodeKind::ComputedMember &&
                   expr->children[1]->kind == NodeKind::StringLit) {
            parts.push_back(expr->children[1]->text);
            expr = expr->children[0].get();
        } else {
            break;
        }
    }
    if (expr->kind != NodeKind::Ident) return "";
    std::string out = expr->text;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) out += "." + *it;
    return out;
}

std::string callee_display_name(const AstNode& call) {
    const AstNode& callee = *call.children[0];
    if (callee.kind == NodeKind::Ident || callee.kind == NodeKind::Member)
        return callee.text;
    return "";
}

const std::set<std::string>& sanitizer_names(int cwe) {
    static const std::set<std::string> html = {
        "escapeHtml", "escapeHTML", "htmlEscape", "encodeHTML", "sanitizeHtml"};
    static const std::set<std::string> shell = {"shellQuote", "escapeShell",
                                                "quote"};
    static const std::set<std::string> path = {"sanitizePath", "normalizePath"};
    static const std::set<std::string> none;
    switch (cwe) {
        case 79: return html;
        case 78: return shell;
        case 22: return path;
        default: return none;
    }
}

template <typename Fn>
void visit_with_parent(const AstNode& n, const AstNode* parent, Fn&& fn) {
    fn(n, parent);
    for (const auto& c : n.children) visit_with_parent(*c, &n, fn);
}

}  // namespace

const std::vector<Ruleset>& ruleset_table() {
    static const std::vector<Ruleset> table = {
        {"R1", EndpointChoice::Base, false, true},
        {"R2", EndpointChoice::Base, true, true},
        {"R3", EndpointChoice::Custom, false, true},
        {"R4", EndpointChoice::Custom, true, true},
        {"R5", EndpointChoice::Combined, false, true},
        {"R6", EndpointChoice::Combined, true, true},
        {"R7", EndpointChoice::Combined, true, false},
    };
    return table;
}

const Ruleset& ruleset_by_name(const std::string& name) {
    for (const auto& r : ruleset_table())
        if (r.name == name) return r;
    throw Error("unknown ruleset: " + name);
}

BaseEndpoints base_endpoints(const ProgramIndex& index, const CweContext& cwe) {
    BaseEndpoints out;
    auto add = [&](std::vector<int>& into, const AstNode* e) {
        int id = index.id_of(e);
        if (id < 0) return;
        if (in_test_dir(index.node(id).file, index.options)) return;
        into.push_back(id);
    };
    std::set<std::string> call_sinks;
    bool first_arg_only = false;
    if (cwe.id == 94) call_sinks = {"eval", "Function"};
    if (cwe.id == 78) call_sinks = {"exec", "execSync", "spawn"};
    if (cwe.id == 22) {
        call_sinks = {"readFile",  "readFileSync",     "writeFile",
                      "writeFileSync", "createReadStream", "open",
                      "unlink"};
        first_arg_only = true;
    }
    if (cwe.id == 89) {
        call_sinks = {"query", "execute"};
        first_arg_only = true;
    }
    for (const auto& file : index.files) {
        if (in_test_dir(file.src.path, index.options)) continue;
        visit_with_parent(*file.ast, nullptr, [&](const AstNode& n,
                                                  const AstNode* parent) {
            // Sources: maximal environment-read member chains.
            if (n.kind == NodeKind::Member || n.kind == NodeKind::ComputedMember) {
                bool maximal =
                    !parent || ((parent->kind != NodeKind::Member &&
                                 parent->kind != NodeKind::ComputedMember) ||
                                parent->children[0].get() != &n);
                bool is_callee = parent && parent->kind == NodeKind::Call &&
                                 parent->children[0].get() == &n;
                if (maximal && !is_callee) {
                    std::string chain = dotted_chain(&n);
                    if (chain.empty() && n.kind == NodeKind::ComputedMember)
                        chain = dotted_chain(n.children[0].get());
                    if (chain == "location.hash" ||
                        chain.rfind("req.query", 0) == 0 ||
                        chain.rfind("req.body", 0) == 0 ||
                        chain.rfind("req.params", 0) == 0 ||
                        chain.rfind("process.argv", 0) == 0)
                        add(out.sources, &n);
                }
            }
            // Sinks per weakness class.
            if (n.kind == NodeKind::Call && !call_sinks.empty() &&
                call_sinks.count(callee_display_name(n))) {
                std::size_t last =
                    first_arg_only ? std::min<std::size_t>(2, n.children.size())
                                   : n.children.size();
                for (std::size_t i = 1; i < last; ++i)
                    add(out.sinks, n.children[i].get());
            }
            if (cwe.id == 79) {
                if (n.kind == NodeKind::Assign &&
                    n.children[0]->kind == NodeKind::Member &&
                    n.children[0]->text == "innerHTML")
                    add(out.sinks, n.children[1].get());
                if (n.kind == NodeKind::Call &&
                    dotted_chain(n.children[0].get()) == "document.write")
                    for (std::size_t i = 1; i < n.children.size(); ++i)
                        add(out.sinks, n.children[i].get());
            }
            if (cwe.id == 915 && n.kind == NodeKind::Assign &&
                n.children[0]->kind == NodeKind::ComputedMember)
                add(out.sinks, n.children[1].get());
            if (cwe.id == 601 && n.kind == NodeKind::Assign &&
                dotted_chain(n.children[0].get()) == "location.href")
                add(out.sinks, n.children[1].get());
        });
    }
    std::sort(out.sources.begin(), out.sources.end());
    out.sources.erase(std::unique(out.sources.begin(), out.sources.end()),
                      out.sources.end());
    std::sort(out.sinks.begin(), out.sinks.end());
    out.sinks.erase(std::unique(out.sinks.begin(), out.sinks.end()),
                    out.sinks.end());
    return out;
}

std::vector<int> sanitizer_barriers(const ProgramIndex& index,
                                    const CweContext& cwe) {
    const auto& names = sanitizer_names(cwe.id);
    std::vector<int> out;
    for (const auto& inv : index.invocations)
        if (names.count(inv.callee_name)) out.push_back(inv.node);
    return out;
}

std::vector<Alert> run_query(const ProgramIndex& index, const CweContext& cwe,
                             const Ruleset& ruleset,
                             const QueryInputs& inputs) {
    BaseEndpoints base = base_endpoints(index, cwe);
    std::set<int> sources, sinks;
    if (ruleset.endpoints != EndpointChoice::Custom) {
        sources.insert(base.sources.begin(), base.sources.end());
        sinks.insert(base.sinks.begin(), base.sinks.end());
    }
    if (ruleset.endpoints != EndpointChoice::Base) {
        sources.insert(inputs.specs.sources.begin(),
                       inputs.specs.sources.end());
        sinks.insert(inputs.specs.sinks.begin(), inputs.specs.sinks.end());
    }

    GraphOptions options;
    options.extended = true;
    options.disabled_rules = inputs.disabled_rules;
    options.access_path_limit = inputs.access_path_limit;
    if (ruleset.enhanced_callgraph) {
        if (inputs.asserted_edges.empty() && inputs.summaries.empty())
            throw UnboundSpecs(
                "enhanced ruleset requires validated call edges or summaries");
        options.asserted_edges = inputs.asserted_edges;
        options.summaries = inputs.summaries;
    }
    if (ruleset.barriers) options.barriers = sanitizer_barriers(index, cwe);
    FlowGraph graph = build_flow_graph(index, options);

    std::set<int> summary_nodes(options.summaries.begin(),
                                options.summaries.end());
    std::map<int, Alert> by_sink;
    for (int sink : sinks) {
        std::set<std::vector<int>> seen;
        for (int source : sources) {
            std::vector<int> path = shortest_path(graph, source, sink);
            if (path.empty()) continue;
            if (!seen.insert(path).second) continue;
            Alert& alert = by_sink[sink];
            alert.cwe = cwe.id;
            alert.sink = sink;
            if (alert.flows.size() >= 8) continue;
            ThreadFlow flow;
            flow.locations = std::move(path);
            for (int node : flow.locations)
                if (summary_nodes.count(node))
                    flow.summaries_used.push_back(node);
            alert.flows.push_back(std::move(flow));
        }
    }
    std::vector<Alert> out;
    for (auto& [sink, alert] : by_sink) out.push_back(std::move(alert));
    return out;
}

SummaryValidation validate_summaries(const ProgramIndex& index,
                                     std::vector<Alert>& alerts,
                                     Oracle& oracle, const CweContext& cwe) {
    SummaryValidation out;
    std::set<int> candidates;
    for (const auto& alert : alerts) {
        if (alert.filtered) continue;
        for (const auto& flow : alert.flows)
            if (!flow.filtered)
                candidates.insert(flow.summaries_used.begin(),
                                  flow.summaries_used.end());
    }
    if (candidates.empty()) return out;

    std::vector<SummaryTask> tasks;
    for (int node : candidates) {
        SummaryTask task;
        task.edge_id = node;
        task.invocation_node = node;
        const InvocationEntry* inv = index.invocation_at(node);
        if (inv && inv->witness) task.library = inv->witness->specifier;
        task.task_id = "summary-node-" + std::to_string(node);
        tasks.push_back(std::move(task));
    }
    out.tasks = static_cast<int>(tasks.size());
    try {
        out.verdicts = oracle.run_flowsummary(index, tasks, cwe);
    } catch (const Error& e) {
        out.warnings.push_back(
            std::string("summary validation unavailable, edges kept as "
                        "propagates: ") +
            e.what());
        return out;
    }

    std::set<int> sanitizing;
    for (const auto& v : out.verdicts)
        if (v.classification == SummaryClass::Sanitizes)
            sanitizing.insert(v.edge_id);
    for (auto& alert : alerts) {
        bool any_active = false;
        for (auto& flow : alert.flows) {
            for (int node : flow.summaries_used)
                if (sanitizing.count(node)) flow.filtered = true;
            if (!flow.filtered) any_active = true;
        }
        if (!any_active) alert.filtered = true;
    }
    return out;
}

const char* match_category_name(MatchCategory c) {
    switch (c) {
        case MatchCategory::Exact: return "exact";
        case MatchCategory::Extended: return "extended";
        case MatchCategory::EquivalentReview: return "equivalent-review";
        case MatchCategory::None: return "none";
    }
    return "?";
}

MatchCategory match_ground_truth(const Alert& alert,
                                 const Annotation& annotation,
                                 const ProgramIndex& index) {
    std::optional<int> src = bind_endpoint(annotation.source, index);
    std::optional<int> snk = bind_endpoint(annotation.sink, index);
    if (!src || !snk)
        throw AnnotationUnbindable("annotation location failed to bind for " +
                                   annotation.finding_id);
    bool touches = false, both_interior = false;
    for (const auto& flow : alert.flows) {
        if (flow.locations.empty()) continue;
        bool has_src = std::find(flow.locations.begin(), flow.locations.end(),
                                 *src) != flow.locations.end();
        bool has_snk = std::find(flow.locations.begin(), flow.locations.end(),
                                 *snk) != flow.locations.end();
        if (flow.locations.front() == *src && flow.locations.back() == *snk)
            return MatchCategory::Exact;
        if (has_src && has_snk) both_interior = true;
        if (has_src || has_snk) touches = true;
    }
    if (both_interior) return MatchCategory::Extended;
    if (touches && alert.cwe == annotation.cwe)
        return MatchCategory::EquivalentReview;
    return MatchCategory::None;
}

std::vector<AblationRow> ablate(const ProgramIndex& index,
                                const CweContext& cwe,
                                const QueryInputs& inputs,
                                const std::vector<Annotation>& annotations) {
    std::vector<AblationRow> rows;
    for (const auto& annotation : annotations)
        rows.push_back({annotation.finding_id, "none", MatchCategory::None});

    for (const auto& ruleset : ruleset_table()) {
        std::vector<Alert> alerts;
        try {
            alerts = run_query(index, cwe, ruleset, inputs);
        } catch (const UnboundSpecs&) {
            continue;  // no repairs available; the ruleset finds nothing new
        }
        for (std::size_t i = 0; i < annotations.size(); ++i) {
            if (rows[i].first_ruleset != "none") continue;
            for (const auto& alert : alerts) {
                if (alert.filtered) continue;
                MatchCategory cat =
                    match_ground_truth(alert, annotations[i], index);
                if (cat == MatchCategory::Exact ||
                    cat == MatchCategory::Extended) {
                    rows[i].first_ruleset = ruleset.name;
                    rows[i].category = cat;
                    break;
                }
            }
        }
    }
    return rows;
}

std::string emit_sarif(const ProgramIndex& index,
                       const std::vector<Alert>& alerts,
                       bool include_filtered) {
    using nlohmann::ordered_json;
    auto location_json = [&](int node_id) {
        const FlowNode& n = index.node(node_id);
        ordered_json loc;
        loc["physicalLocation"]["artifactLocation"]["uri"] = n.file;
        loc["physicalLocation"]["region"] = {
            {"startLine", n.span.start_line},
            {"startColumn", n.span.start_col},
            {"endLine", n.span.end_line},
            {"endColumn", n.span.end_col}};
        loc["message"]["text"] = endpoint_text(n.snippet);
        return loc;
    };

    ordered_json results = ordered_json::array();
    std::vector<const Alert*> ordered;
    for (const auto& a : alerts) ordered.push_back(&a);
    std::sort(ordered.begin(), ordered.end(),
              [](const Alert* a, const Alert* b) { return a->sink < b->sink; });
    for (const Alert* alert : ordered) {
        if (alert->filtered && !include_filtered) continue;
        ordered_json result;
        result["ruleId"] = "CWE-" + std::to_string(alert->cwe);
        result["level"] = "warning";
        const FlowNode& sink = index.node(alert->sink);
        result["message"]["text"] =
            "tainted value reaches " + endpoint_text(sink.snippet) + " at " +
            sink.file + ":" + std::to_string(sink.span.start_line);
        result["locations"] = ordered_json::array({location_json(alert->sink)});
        ordered_json code_flows = ordered_json::array();
        for (const auto& flow : alert->flows) {
            if (flow.filtered && !include_filtered) continue;
            ordered_json locations = ordered_json::array();
            for (int node : flow.locations) {
                ordered_json entry;
                entry["location"] = location_json(node);
                locations.push_back(std::move(entry));
            }
            ordered_json thread_flow;
            thread_flow["locations"] = std::move(locations);
            ordered_json code_flow;
            code_flow["threadFlows"] = ordered_json::array(
                {std::move(thread_flow)});
            code_flows.push_back(std::move(code_flow));
        }
        result["codeFlows"] = std::move(code_flows);
        if (alert->filtered) {
            result["suppressions"] = ordered_json::array(
                {{{"kind", "inSource"},
                  {"justification",
                   "sanitized by a validated flow summary"}}});
        }
        results.push_back(std::move(result));
    }

    ordered_json doc;
    doc["$schema"] =
        "https://json.schemastore.org/sarif-2.1.0.json";
    doc["version"] = "2.1.0";
    ordered_json run;
    run["tool"]["driver"]["name"] = "taintjs";
    run["tool"]["driver"]["version"] = "0.1.0";
    run["results"] = std::move(results);
    doc["runs"] = ordered_json::array({std::move(run)});
    return doc.dump(2) + "\n";
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
    std::string out = "finding_id,first_ruleset,category\n";
    for (const auto& r : rows)
        out += r.finding_id + "," + r.first_ruleset + "," +
               match_category_name(r.category) + "\n";
    return out;
}

}  // namespace taintjs
