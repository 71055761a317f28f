#include "taintjs/flowgraph.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <set>

namespace taintjs {

namespace {

const std::array<const char*, 10> kStringMethods = {
    "trim", "slice", "concat", "join",  "toLowerCase",
    "toUpperCase", "replace", "split", "map", "filter",
};

// The hub node of a declaration: the function node for declarations, the
// parameter node for parameters, the identifier node for variables.
int hub_of(const ProgramIndex& idx, const AstNode* use) {
    auto it = idx.decl_of.find(use);
    if (it == idx.decl_of.end()) return -1;
    return idx.id_of(it->second);
}

// Is the declaration a single-assignment const/let binding? Returns its only
// value, or nullptr.
const AstNode* single_const_value(const ProgramIndex& idx,
                                  const AstNode* decl) {
    auto sit = idx.decl_stmt_of.find(decl);
    if (sit == idx.decl_stmt_of.end() ||
        sit->second->kind != NodeKind::VarDecl)
        return nullptr;
    const std::string& kw = sit->second->text;
    if (kw != "const" && kw != "let") return nullptr;
    auto vit = idx.values_of.find(decl);
    if (vit == idx.values_of.end() || vit->second.size() != 1) return nullptr;
    return vit->second[0];
}

// Number of member accesses between the expression and its access-path root.
int chain_depth(const AstNode* expr) {
    int depth = 0;
    while (expr->kind == NodeKind::Member ||
           expr->kind == NodeKind::ComputedMember) {
        ++depth;
        expr = expr->children[0].get();
    }
    return depth;
}

const AstNode* chain_root(const AstNode* expr) {
    while (expr->kind == NodeKind::Member ||
           expr->kind == NodeKind::ComputedMember)
        expr = expr->children[0].get();
    return expr;
}

struct Builder {
    const ProgramIndex& idx;
    const GraphOptions& opts;
    std::set<int> barriers;
    std::set<FlowEdge> edges;
    std::set<int> unresolved;  // filtered M, for the extended rules

    bool rule_enabled(EdgeLabel rule) const {
        if (!opts.extended) return false;
        return std::find(opts.disabled_rules.begin(), opts.disabled_rules.end(),
                         rule) == opts.disabled_rules.end();
    }

    void add(int from, int to, EdgeLabel label) {
        if (from < 0 || to < 0 || from == to) return;
        if (barriers.count(from) || barriers.count(to)) return;
        edges.insert({from, to, label});
    }

    int id(const AstNode* ast) const { return idx.id_of(ast); }

    void visit(const AstNode& n) {
        switch (n.kind) {
            case NodeKind::VarDecl:
                if (n.children.size() > 1)
                    add(id(n.children[1].get()), id(n.children[0].get()),
                        EdgeLabel::Intra);
                break;
            case NodeKind::ForOf:
                // Element-of flow approximated as whole-value flow.
                add(id(n.children[1].get()), id(n.children[0].get()),
                    EdgeLabel::Intra);
                break;
            case NodeKind::Ident: {
                // Declaration-site identifiers have no self edge; every other
                // resolved identifier reads from its hub.
                if (idx.decl_stmt_of.count(&n)) break;
                add(hub_of(idx, &n), id(&n), EdgeLabel::Intra);
                break;
            }
            case NodeKind::Assign: {
                const AstNode* lhs = n.children[0].get();
                const AstNode* rhs = n.children[1].get();
                add(id(rhs), id(&n), EdgeLabel::Intra);
                if (lhs->kind == NodeKind::Ident) {
                    add(id(rhs), hub_of(idx, lhs), EdgeLabel::Intra);
                } else if (rule_enabled(EdgeLabel::Object)) {
                    // Object rule, write half: the written value taints the
                    // base object and its root binding.
                    const AstNode* base = lhs->children[0].get();
                    add(id(rhs), id(base), EdgeLabel::Object);
                    const AstNode* root = chain_root(lhs);
                    if (root->kind == NodeKind::Ident)
                        add(id(rhs), hub_of(idx, root), EdgeLabel::Object);
                }
                break;
            }
            case NodeKind::TemplateLit:
                for (const auto& c : n.children)
                    if (c->kind != NodeKind::TemplateChunk)
                        add(id(c.get()), id(&n), EdgeLabel::Intra);
                break;
            case NodeKind::Binary:
                if (n.text == "+") {
                    add(id(n.children[0].get()), id(&n), EdgeLabel::Intra);
                    add(id(n.children[1].get()), id(&n), EdgeLabel::Intra);
                }
                break;
            case NodeKind::Member:
            case NodeKind::ComputedMember:
                if (chain_depth(&n) <= opts.access_path_limit)
                    add(id(n.children[0].get()), id(&n), EdgeLabel::Intra);
                break;
            case NodeKind::Call:
                visit_call(n);
                break;
            case NodeKind::ObjectLit:
                visit_object(n);
                break;
            default:
                break;
        }
        for (const auto& c : n.children) visit(*c);
    }

    void visit_call(const AstNode& n) {
        int call_id = id(&n);
        const InvocationEntry* inv = idx.invocation_at(call_id);
        if (!inv) return;
        if (is_require_call(n)) return;  // module-system intrinsic

        auto callees = resolve_callees_p0(*inv, idx);
        if (!callees.empty()) {
            for (const FunctionEntry* fe : callees) {
                std::size_t arity = std::min(inv->args.size(), fe->params.size());
                for (std::size_t i = 0; i < arity; ++i)
                    add(inv->args[i], fe->params[i], EdgeLabel::CallArg);
                for (int r : fe->returns)
                    add(r, call_id, EdgeLabel::CallReturn);
            }
            return;
        }
        if (matches_summary_catalog(*inv)) {
            // Receiver and arguments flow through to the result.
            const AstNode* callee = n.children[0].get();
            if (callee->kind == NodeKind::Member ||
                callee->kind == NodeKind::ComputedMember)
                add(id(callee->children[0].get()), call_id,
                    EdgeLabel::SummaryInternal);
            for (int a : inv->args)
                add(a, call_id, EdgeLabel::SummaryInternal);
            return;
        }
        if (unresolved.count(call_id)) {
            // Import-boundary calls carry taint only through candidate
            // summaries; the extended rules cover first-party dispatch.
            if (inv->boundary_hint == Boundary::Third) return;
            // Param rule: every argument may flow into the unresolved call.
            if (rule_enabled(EdgeLabel::Param))
                for (int a : inv->args) add(a, call_id, EdgeLabel::Param);
            // Method rule: the receiver binding taints method calls reached
            // through any member chain rooted at it.
            const AstNode* callee = n.children[0].get();
            if (rule_enabled(EdgeLabel::Method) &&
                (callee->kind == NodeKind::Member ||
                 callee->kind == NodeKind::ComputedMember)) {
                const AstNode* root = chain_root(callee);
                if (root->kind == NodeKind::Ident)
                    add(hub_of(idx, root), call_id, EdgeLabel::Method);
            }
        }
    }

    void visit_object(const AstNode& n) {
        int obj_id = id(&n);
        for (const auto& prop : n.children) {
            const AstNode* value = prop->children[0].get();
            if (rule_enabled(EdgeLabel::Object))
                add(id(value), obj_id, EdgeLabel::Object);
            if (is_function_kind(value->kind) &&
                rule_enabled(EdgeLabel::FuncObj)) {
                // Func-Obj rule: the function value, its parameters, and its
                // returns all taint the immediate containing object.
                const FunctionEntry* fe = idx.function_at(value);
                if (!fe) continue;
                add(fe->node, obj_id, EdgeLabel::FuncObj);
                for (int p : fe->params) add(p, obj_id, EdgeLabel::FuncObj);
                for (int r : fe->returns) add(r, obj_id, EdgeLabel::FuncObj);
            }
        }
    }
};

}  // namespace

const char* edge_label_name(EdgeLabel l) {
    switch (l) {
        case EdgeLabel::Intra: return "intra";
        case EdgeLabel::CallArg: return "call-arg";
        case EdgeLabel::CallReturn: return "call-return";
        case EdgeLabel::Param: return "param";
        case EdgeLabel::Object: return "object";
        case EdgeLabel::FuncObj: return "func-obj";
        case EdgeLabel::Method: return "method";
        case EdgeLabel::AssertedEdge: return "asserted-edge";
        case EdgeLabel::CandidateSummary: return "candidate-summary";
        case EdgeLabel::SummaryInternal: return "summary-internal";
    }
    return "?";
}

std::vector<const FunctionEntry*> resolve_callees_p0(
    const InvocationEntry& invocation, const ProgramIndex& index) {
    const AstNode* callee = invocation.ast->children[0].get();
    auto entry = [&](const AstNode* fn) -> std::vector<const FunctionEntry*> {
        const FunctionEntry* fe = index.function_at(fn);
        if (fe) return {fe};
        return {};
    };
    // Immediately invoked function expression.
    if (is_function_kind(callee->kind)) return entry(callee);
    if (callee->kind == NodeKind::Ident) {
        auto dit = index.decl_of.find(callee);
        if (dit == index.decl_of.end()) return {};
        const AstNode* decl = dit->second;
        // Direct call of a lexically visible declaration (or a named
        // function expression calling itself).
        if (is_function_kind(decl->kind)) return entry(decl);
        const AstNode* value = single_const_value(index, decl);
        if (value && is_function_kind(value->kind)) return entry(value);
        return {};
    }
    if (callee->kind == NodeKind::Member &&
        callee->children[0]->kind == NodeKind::Ident) {
        auto dit = index.decl_of.find(callee->children[0].get());
        if (dit == index.decl_of.end()) return {};
        const AstNode* value = single_const_value(index, dit->second);
        if (!value || value->kind != NodeKind::ObjectLit) return {};
        for (const auto& prop : value->children)
            if (prop->text == callee->text &&
                is_function_kind(prop->children[0]->kind))
                return entry(prop->children[0].get());
    }
    return {};
}

bool matches_summary_catalog(const InvocationEntry& invocation) {
    const AstNode* callee = invocation.ast->children[0].get();
    if (callee->kind != NodeKind::Member) return false;
    const std::string& name = callee->text;
    const AstNode* base = callee->children[0].get();
    if (base->kind == NodeKind::Ident && base->text == "JSON")
        return name == "stringify" || name == "parse";
    if (base->kind == NodeKind::Ident && base->text == "Object")
        return name == "assign" || name == "entries";
    for (const char* m : kStringMethods)
        if (name == m) return true;
    return false;
}

UnresolvedCallSet unresolved_calls(const ProgramIndex& index) {
    UnresolvedCallSet out;
    for (const InvocationEntry& inv : index.invocations) {
        if (inv.in_test_dir) continue;
        if (is_require_call(*inv.ast)) continue;
        if (!resolve_callees_p0(inv, index).empty()) continue;
        out.raw.push_back(inv.node);
        if (!matches_summary_catalog(inv)) out.filtered.push_back(inv.node);
    }
    return out;
}

FlowGraph build_flow_graph(const ProgramIndex& index,
                           const GraphOptions& options) {
    int n = static_cast<int>(index.nodes.size());
    auto check = [&](int id, FlowKind want, const char* what) {
        if (id < 0 || id >= n || index.node(id).kind != want)
            throw DanglingEdge(std::string("asserted edge ") + what +
                               " node " + std::to_string(id) +
                               " is not in the registry");
    };
    Builder b{index, options};
    b.barriers.insert(options.barriers.begin(), options.barriers.end());
    auto m = unresolved_calls(index);
    b.unresolved.insert(m.filtered.begin(), m.filtered.end());
    for (const auto& f : index.files) b.visit(*f.ast);

    for (const auto& [call, target] : options.asserted_edges) {
        check(call, FlowKind::Invocation, "call");
        check(target, FlowKind::Function, "target");
        const InvocationEntry* inv = index.invocation_at(call);
        const FunctionEntry* fe = nullptr;
        for (const FunctionEntry& cand : index.functions)
            if (cand.node == target) fe = &cand;
        if (!inv || !fe)
            throw DanglingEdge("asserted edge endpoints not indexed");
        std::size_t arity = std::min(inv->args.size(), fe->params.size());
        for (std::size_t i = 0; i < arity; ++i)
            b.add(inv->args[i], fe->params[i], EdgeLabel::AssertedEdge);
        for (int r : fe->returns) b.add(r, call, EdgeLabel::AssertedEdge);
    }
    for (int call : options.summaries) {
        const InvocationEntry* inv = index.invocation_at(call);
        if (!inv) throw DanglingEdge("summary call not indexed");
        const AstNode* callee = inv->ast->children[0].get();
        if (callee->kind == NodeKind::Member ||
            callee->kind == NodeKind::ComputedMember)
            b.add(index.id_of(callee->children[0].get()), call,
                  EdgeLabel::CandidateSummary);
        for (int a : inv->args) b.add(a, call, EdgeLabel::CandidateSummary);
    }

    FlowGraph g;
    g.node_count = n;
    g.edges.assign(b.edges.begin(), b.edges.end());
    g.successors.assign(static_cast<std::size_t>(n), {});
    g.predecessors.assign(static_cast<std::size_t>(n), {});
    for (const FlowEdge& e : g.edges) {
        g.successors[static_cast<std::size_t>(e.from)].push_back(e.to);
        g.predecessors[static_cast<std::size_t>(e.to)].push_back(e.from);
    }
    for (auto& v : g.successors) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    for (auto& v : g.predecessors) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return g;
}

std::vector<int> reachable(const FlowGraph& graph, const std::vector<int>& seeds,
                           Direction direction) {
    const auto& adj = direction == Direction::Forward ? graph.successors
                                                      : graph.predecessors;
    std::vector<char> seen(static_cast<std::size_t>(graph.node_count), 0);
    std::deque<int> queue;
    for (int s : seeds)
        if (s >= 0 && s < graph.node_count && !seen[static_cast<std::size_t>(s)]) {
            seen[static_cast<std::size_t>(s)] = 1;
            queue.push_back(s);
        }
    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        for (int next : adj[static_cast<std::size_t>(cur)])
            if (!seen[static_cast<std::size_t>(next)]) {
                seen[static_cast<std::size_t>(next)] = 1;
                queue.push_back(next);
            }
    }
    std::vector<int> out;
    for (int i = 0; i < graph.node_count; ++i)
        if (seen[static_cast<std::size_t>(i)]) out.push_back(i);
    return out;
}

std::vector<int> shortest_path(const FlowGraph& graph, int from, int to) {
    if (from < 0 || to < 0 || from >= graph.node_count || to >= graph.node_count)
        return {};
    // Distance-to-target via reverse BFS, then a greedy forward walk picking
    // the smallest-id successor each step for a lexicographically minimal
    // shortest path.
    std::vector<int> dist(static_cast<std::size_t>(graph.node_count), -1);
    std::deque<int> queue{to};
    dist[static_cast<std::size_t>(to)] = 0;
    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        for (int prev : graph.predecessors[static_cast<std::size_t>(cur)])
            if (dist[static_cast<std::size_t>(prev)] < 0) {
                dist[static_cast<std::size_t>(prev)] =
                    dist[static_cast<std::size_t>(cur)] + 1;
                queue.push_back(prev);
            }
    }
    if (dist[static_cast<std::size_t>(from)] < 0) return {};
    std::vector<int> path{from};
    int cur = from;
    while (cur != to) {
        int want = dist[static_cast<std::size_t>(cur)] - 1;
        int next = -1;
        for (int s : graph.successors[static_cast<std::size_t>(cur)])
            if (dist[static_cast<std::size_t>(s)] == want) {
                next = s;
                break;  // successors are ascending: first hit is smallest
            }
        if (next < 0) return {};
        path.push_back(next);
        cur = next;
    }
    return path;
}

std::string dump_graph(const FlowGraph& graph) {
    std::string out;
    for (const FlowEdge& e : graph.edges) {
        out += std::to_string(e.from);
        out += ',';
        out += std::to_string(e.to);
        out += ',';
        out += edge_label_name(e.label);
        out += '\n';
    }
    return out;
}

}  // namespace taintjs
