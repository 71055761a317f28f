#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "taintjs/flowgraph.hpp"
#include "taintjs/oracle.hpp"

namespace taintjs {

namespace {

EndpointLocation location_of(const FlowNode& n) {
    return {n.file, n.span.start_line, n.span.start_col,
            endpoint_text(n.snippet)};
}

bool is_builtin_callee(const std::string& name) {
    static const std::set<std::string> names = {
        "eval",       "Function",  "setTimeout", "setInterval", "require",
        "parseInt",   "parseFloat", "String",    "Number",      "Boolean",
        "encodeURIComponent", "decodeURIComponent",
    };
    return names.count(name) > 0;
}

// Dotted rendering of a member chain ("req.query.q"); empty when any hop is
// dynamic or the root is not an identifier.
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
    for (auto it = parts.rbegin(); it != parts.rend(); ++it)
        out += "." + *it;
    return out;
}

std::string callee_display_name(const AstNode& call) {
    const AstNode& callee = *call.children[0];
    if (callee.kind == NodeKind::Ident) return callee.text;
    if (callee.kind == NodeKind::Member) return callee.text;
    return "";
}

// The function entry whose span most tightly encloses the given node.
const FunctionEntry* enclosing_function(const ProgramIndex& idx,
                                        const FlowNode& node) {
    const FunctionEntry* best = nullptr;
    for (const auto& fe : idx.functions) {
        if (fe.file != node.file || !fe.span.contains(node.span)) continue;
        if (fe.span == node.span) continue;  // the node itself
        if (!best || best->span.contains(fe.span)) best = &fe;
    }
    return best;
}

// Resolution engine: constant-propagation over single-assignment keys,
// object-literal property tables, Object.assign merges, member-path
// property writes, Object.entries pairs, and one level of
// callback-argument tracking.
struct Resolver {
    const ProgramIndex& idx;
    std::vector<std::string> trace;
    bool saw_require = false;
    std::string require_spec;
    int require_line = 0;
    std::string require_file;

    // (root declaration, member path) -> assigned values.
    std::map<std::pair<const AstNode*, std::vector<std::string>>,
             std::vector<const AstNode*>>
        property_writes;

    explicit Resolver(const ProgramIndex& index) : idx(index) {
        for (const auto& inv_file : idx.files) {
            walk(*inv_file.ast, [&](const AstNode& n) {
                if (n.kind != NodeKind::Assign) return;
                const AstNode* lhs = n.children[0].get();
                if (lhs->kind != NodeKind::Member &&
                    lhs->kind != NodeKind::ComputedMember)
                    return;
                std::vector<std::string> path;
                const AstNode* cur = lhs;
                bool ok = true;
                while (cur->kind == NodeKind::Member ||
                       cur->kind == NodeKind::ComputedMember) {
                    if (cur->kind == NodeKind::Member) {
                        path.insert(path.begin(), cur->text);
                    } else if (cur->children[1]->kind == NodeKind::StringLit) {
                        path.insert(path.begin(), cur->children[1]->text);
                    } else {
                        ok = false;
                        break;
                    }
                    cur = cur->children[0].get();
                }
                if (!ok || cur->kind != NodeKind::Ident) return;
                auto dit = idx.decl_of.find(cur);
                if (dit == idx.decl_of.end()) return;
                property_writes[{dit->second, path}].push_back(
                    n.children[1].get());
            });
        }
    }

    void note(const std::string& step) {
        if (trace.size() < 24) trace.push_back(step);
    }

    // Known string value of an expression (literal or single-assignment
    // const of a literal); nullopt when dynamic.
    std::optional<std::string> const_string(const AstNode* e,
                                            int depth = 3) {
        if (depth <= 0) return std::nullopt;
        if (e->kind == NodeKind::StringLit) return e->text;
        if (e->kind == NodeKind::NumberLit) return e->text;
        if (e->kind == NodeKind::Ident) {
            auto dit = idx.decl_of.find(e);
            if (dit == idx.decl_of.end()) return std::nullopt;
            auto vit = idx.values_of.find(dit->second);
            if (vit == idx.values_of.end() || vit->second.size() != 1)
                return std::nullopt;
            return const_string(vit->second[0], depth - 1);
        }
        return std::nullopt;
    }

    bool is_object_entries(const AstNode* e, const AstNode** subject) {
        if (e->kind != NodeKind::Call) return false;
        const AstNode* callee = e->children[0].get();
        if (callee->kind != NodeKind::Member || callee->text != "entries")
            return false;
        if (callee->children[0]->kind != NodeKind::Ident ||
            callee->children[0]->text != "Object")
            return false;
        if (e->children.size() < 2) return false;
        *subject = e->children[1].get();
        return true;
    }

    bool is_object_assign(const AstNode* e) {
        if (e->kind != NodeKind::Call) return false;
        const AstNode* callee = e->children[0].get();
        return callee->kind == NodeKind::Member && callee->text == "assign" &&
               callee->children[0]->kind == NodeKind::Ident &&
               callee->children[0]->text == "Object";
    }

    // Object-literal tables an expression may denote.
    std::vector<const AstNode*> tables_of(const AstNode* e, int depth) {
        if (depth <= 0) return {};
        if (e->kind == NodeKind::ObjectLit) return {e};
        if (is_object_assign(e)) {
            std::vector<const AstNode*> out;
            for (std::size_t i = 1; i < e->children.size(); ++i)
                for (const AstNode* t : tables_of(e->children[i].get(), depth - 1))
                    out.push_back(t);
            note("Object.assign merge at line " +
                 std::to_string(e->span.start_line));
            return out;
        }
        if (e->kind == NodeKind::Ident) {
            auto dit = idx.decl_of.find(e);
            if (dit == idx.decl_of.end()) return {};
            return tables_of_decl(dit->second, depth);
        }
        if (e->kind == NodeKind::Member || e->kind == NodeKind::ComputedMember) {
            // A property read: tables among the property's values.
            std::vector<const AstNode*> out;
            for (const AstNode* v : property_values(e, depth - 1))
                for (const AstNode* t : tables_of(v, depth - 1))
                    out.push_back(t);
            return out;
        }
        if (e->kind == NodeKind::Call) {
            std::string spec;
            if (is_require_call(*e, &spec)) record_require(e, spec);
        }
        return {};
    }

    std::vector<const AstNode*> tables_of_decl(const AstNode* decl,
                                               int depth) {
        std::vector<const AstNode*> out;
        if (decl->kind == NodeKind::Param) {
            for (const AstNode* arg : caller_args(decl, depth - 1))
                for (const AstNode* t : tables_of(arg, depth - 1))
                    out.push_back(t);
            return out;
        }
        auto vit = idx.values_of.find(decl);
        if (vit == idx.values_of.end()) return out;
        for (const AstNode* v : vit->second)
            for (const AstNode* t : tables_of(v, depth))
                out.push_back(t);
        return out;
    }

    void record_require(const AstNode* call, const std::string& spec) {
        if (spec.rfind("./", 0) == 0 || spec.rfind("../", 0) == 0) return;
        saw_require = true;
        require_spec = spec;
        require_line = call->span.start_line;
        int id = idx.id_of(call);
        require_file = id >= 0 ? idx.node(id).file : "";
    }

    // Values stored at a member expression's key, drawing from object
    // literals, property writes, and Object.entries pair elements.
    std::vector<const AstNode*> property_values(const AstNode* member,
                                                int depth) {
        if (depth <= 0) return {};
        std::vector<const AstNode*> out;
        const AstNode* base = member->children[0].get();
        std::optional<std::string> key;
        bool dynamic = false;
        if (member->kind == NodeKind::Member) {
            key = member->text;
        } else {
            key = const_string(member->children[1].get());
            if (!key) dynamic = true;
        }

        // Object.entries pairs: entry[1] (or a dynamic index) denotes the
        // property values of the listed object.
        if (base->kind == NodeKind::Ident) {
            auto dit = idx.decl_of.find(base);
            if (dit != idx.decl_of.end()) {
                auto vit = idx.values_of.find(dit->second);
                if (vit != idx.values_of.end()) {
                    for (const AstNode* v : vit->second) {
                        const AstNode* subject = nullptr;
                        if (is_object_entries(v, &subject)) {
                            if (dynamic || *key == "1") {
                                note("pair element over Object.entries at "
                                     "line " +
                                     std::to_string(v->span.start_line));
                                for (const AstNode* t :
                                     tables_of(subject, depth - 1))
                                    for (const auto& prop : t->children)
                                        out.push_back(prop->children[0].get());
                            }
                            return out;
                        }
                    }
                }
            }
        }

        for (const AstNode* table : tables_of(base, depth)) {
            for (const auto& prop : table->children)
                if (dynamic || prop->text == *key)
                    out.push_back(prop->children[0].get());
        }
        // Property writes on the base binding: table['k'] = v / table.k = v.
        const AstNode* root = base;
        std::vector<std::string> prefix;
        while (root->kind == NodeKind::Member ||
               root->kind == NodeKind::ComputedMember) {
            if (root->kind == NodeKind::Member)
                prefix.insert(prefix.begin(), root->text);
            else if (root->children[1]->kind == NodeKind::StringLit)
                prefix.insert(prefix.begin(), root->children[1]->text);
            else
                return out;
            root = root->children[0].get();
        }
        if (root->kind == NodeKind::Ident) {
            auto dit = idx.decl_of.find(root);
            if (dit != idx.decl_of.end()) {
                for (const auto& [pw_key, values] : property_writes) {
                    if (pw_key.first != dit->second) continue;
                    const auto& path = pw_key.second;
                    if (path.size() != prefix.size() + 1) continue;
                    if (!std::equal(prefix.begin(), prefix.end(), path.begin()))
                        continue;
                    if (dynamic || path.back() == *key)
                        for (const AstNode* v : values) out.push_back(v);
                }
            }
        }
        return out;
    }

    // Function definitions an expression may evaluate to.
    std::vector<const AstNode*> functions_of(const AstNode* e, int depth) {
        if (depth <= 0) return {};
        if (is_function_kind(e->kind)) return {e};
        std::string spec;
        if (e->kind == NodeKind::Call && is_require_call(*e, &spec)) {
            record_require(e, spec);
            return {};
        }
        if (e->kind == NodeKind::Ident) {
            auto dit = idx.decl_of.find(e);
            if (dit == idx.decl_of.end()) return {};
            const AstNode* decl = dit->second;
            if (is_function_kind(decl->kind)) return {decl};
            if (decl->kind == NodeKind::Param) {
                std::vector<const AstNode*> out;
                for (const AstNode* arg : caller_args(decl, depth - 1)) {
                    note("callback argument traced at line " +
                         std::to_string(arg->span.start_line));
                    for (const AstNode* f : functions_of(arg, depth - 1))
                        out.push_back(f);
                }
                return out;
            }
            std::vector<const AstNode*> out;
            auto vit = idx.values_of.find(decl);
            if (vit != idx.values_of.end())
                for (const AstNode* v : vit->second)
                    for (const AstNode* f : functions_of(v, depth - 1))
                        out.push_back(f);
            return out;
        }
        if (e->kind == NodeKind::Member || e->kind == NodeKind::ComputedMember) {
            std::vector<const AstNode*> out;
            for (const AstNode* v : property_values(e, depth)) {
                for (const AstNode* f : functions_of(v, depth - 1))
                    out.push_back(f);
            }
            return out;
        }
        return {};
    }

    // Arguments supplied at the parameter's position by resolvable callers.
    std::vector<const AstNode*> caller_args(const AstNode* param, int depth) {
        if (depth <= 0) return {};
        // Which function owns this parameter, and at which index?
        const FunctionEntry* owner = nullptr;
        std::size_t position = 0;
        for (const auto& fe : idx.functions) {
            for (std::size_t i = 0; i < fe.params.size(); ++i)
                if (idx.node(fe.params[i]).ast == param) {
                    owner = &fe;
                    position = i;
                }
        }
        if (!owner) return {};
        std::vector<const AstNode*> out;
        for (const auto& inv : idx.invocations) {
            bool calls_owner = false;
            for (const FunctionEntry* fe : resolve_callees_p0(inv, idx))
                if (fe == owner) calls_owner = true;
            if (!calls_owner) {
                for (const AstNode* f :
                     functions_of(inv.ast->children[0].get(), depth - 1))
                    if (f == owner->ast) calls_owner = true;
            }
            if (calls_owner && position < inv.args.size())
                out.push_back(idx.node(inv.args[position]).ast);
        }
        return out;
    }
};

// Functions reachable from the package export surface: module.exports = X /
// exports.name = X, following factory calls into returned functions.
std::vector<const AstNode*> exported_functions(const ProgramIndex& idx) {
    Resolver r(idx);
    std::vector<const AstNode*> out;
    std::set<const AstNode*> seen;
    auto follow = [&](auto&& self, const AstNode* e, int depth) -> void {
        if (depth <= 0) return;
        for (const AstNode* f : r.functions_of(e, 4))
            if (seen.insert(f).second) out.push_back(f);
        // Exported object literal: every property value is part of the
        // surface.
        if (e->kind == NodeKind::ObjectLit)
            for (const auto& prop : e->children)
                self(self, prop->children[0].get(), depth - 1);
        // Factory call: follow into the callee's returned expressions.
        if (e->kind == NodeKind::Call) {
            for (const AstNode* callee :
                 r.functions_of(e->children[0].get(), 4)) {
                const FunctionEntry* fe = idx.function_at(callee);
                if (!fe) continue;
                for (int ret : fe->returns)
                    self(self, idx.node(ret).ast, depth - 1);
            }
        }
    };
    for (const auto& f : idx.files) {
        walk(*f.ast, [&](const AstNode& n) {
            if (n.kind != NodeKind::Assign) return;
            const AstNode* lhs = n.children[0].get();
            std::string chain = dotted_chain(lhs);
            if (chain == "module.exports" || chain.rfind("exports.", 0) == 0 ||
                chain.rfind("module.exports.", 0) == 0)
                follow(follow, n.children[1].get(), 3);
        });
    }
    return out;
}

class DeterministicBackend : public Backend {
  public:
    DiscoveryRun discover(const ProgramIndex& idx, const CweContext& cwe,
                          int run, Transcript& t) override {
        (void)run;
        DiscoveryRun out;
        t.tool_calls.push_back(
            {"view_dir", "{\"path\":\"source\"}", "package tree scanned"});

        // Environment-read source catalog.
        for (const auto& file : idx.files) {
            if (in_test_dir(file.src.path, idx.options)) continue;
            collect_env_sources(idx, *file.ast, nullptr, out);
        }
        // Entry-point parameters of the export surface.
        for (const AstNode* fn : exported_functions(idx)) {
            const FunctionEntry* fe = idx.function_at(fn);
            if (!fe || fe->params.empty()) continue;
            const FlowNode& p = idx.node(fe->params[0]);
            if (in_test_dir(p.file, idx.options)) continue;
            out.sources.push_back(
                {location_of(p), 4,
                 "first parameter of an exported entry point"});
        }
        collect_sinks(idx, cwe, out);
        t.proposals = std::to_string(out.sources.size()) + " sources, " +
                      std::to_string(out.sinks.size()) + " sinks";
        return out;
    }

    ResolutionRun resolve(const ProgramIndex& idx, const ResolutionTask& task,
                          int run, Transcript& t) override {
        (void)run;
        ResolutionRun out;
        const InvocationEntry* inv = idx.invocation_at(task.invocation_node);
        if (!inv) {
            out.verdict = ResolutionVerdict::Unresolvable;
            out.reason = "invocation not indexed";
            return out;
        }
        const FlowNode& node = idx.node(task.invocation_node);
        t.tool_calls.push_back(
            {"view_src",
             "{\"path\":\"source/" + node.file + "\",\"line\":" +
                 std::to_string(node.span.start_line) + "}",
             endpoint_text(node.snippet)});

        if (inv->boundary_hint == Boundary::Third && inv->witness) {
            out.verdict = ResolutionVerdict::Third;
            out.tp_metadata = TpMetadata{
                inv->witness->specifier,
                "node_modules/" + inv->witness->specifier + "/index.js",
                "require('" + inv->witness->specifier + "') at " +
                    inv->witness->file + ":" +
                    std::to_string(inv->witness->line)};
            out.reason = "callee traces to a third-party import";
            return out;
        }
        const AstNode* callee = inv->ast->children[0].get();
        if (callee->kind == NodeKind::Ident &&
            is_builtin_callee(callee->text)) {
            out.verdict = ResolutionVerdict::Unresolvable;
            out.reason = "language or platform builtin: " + callee->text;
            return out;
        }

        Resolver r(idx);
        std::vector<const AstNode*> fns = r.functions_of(callee, 6);
        std::sort(fns.begin(), fns.end());
        fns.erase(std::unique(fns.begin(), fns.end()), fns.end());
        if (r.saw_require && fns.empty()) {
            out.verdict = ResolutionVerdict::Third;
            out.tp_metadata = TpMetadata{
                r.require_spec,
                "node_modules/" + r.require_spec + "/index.js",
                "require('" + r.require_spec + "') at " + r.require_file +
                    ":" + std::to_string(r.require_line)};
            out.reason = "callee traces to a third-party import";
            return out;
        }
        if (fns.empty()) {
            out.verdict = ResolutionVerdict::Unresolvable;
            out.reason = "no constant-propagation path to a definition";
            return out;
        }
        // Deterministic candidate order: registry index order.
        std::vector<const FunctionEntry*> entries;
        for (const AstNode* f : fns)
            if (const FunctionEntry* fe = idx.function_at(f))
                entries.push_back(fe);
        std::sort(entries.begin(), entries.end(),
                  [](const FunctionEntry* a, const FunctionEntry* b) {
                      return a->index < b->index;
                  });
        out.verdict = ResolutionVerdict::First;
        for (const FunctionEntry* fe : entries) {
            FpCandidate fp;
            fp.function_index = fe->index;
            fp.confidence = 5;
            fp.trace = r.trace.empty()
                           ? std::vector<std::string>{
                                 "definition at " + fe->file + ":" +
                                 std::to_string(fe->span.start_line)}
                           : r.trace;
            fp.trace.push_back("definition at " + fe->file + ":" +
                               std::to_string(fe->span.start_line));
            out.fp_candidates.push_back(std::move(fp));
        }
        out.reason = "constant propagation over local tables";
        return out;
    }

    SummaryRun summarize(const ProgramIndex& idx, const SummaryTask& task,
                         const CweContext& cwe, int run,
                         Transcript& t) override {
        (void)run;
        SummaryRun out;
        if (task.library.empty()) {
            out.classification = SummaryClass::Unknown;
            out.confidence = 2;
            return out;
        }
        Toolbelt tools(idx);
        std::string text;
        std::string entry = task.library + "/index.js";
        try {
            text = tools.view_src("npm/" + entry);
            t.tool_calls.push_back(
                {"view_src", "{\"path\":\"npm/" + entry + "\"}",
                 "library entry viewed"});
        } catch (const Error&) {
            out.classification = SummaryClass::Unknown;
            out.confidence = 2;
            out.trace = {"library entry file not indexed: " + entry};
            return out;
        }
        std::vector<std::string> escape_names;
        if (cwe.id == 79)
            escape_names = {"escapeHtml", "escapeHTML", "encodeHTML",
                            "htmlEscape", "sanitizeHtml"};
        else if (cwe.id == 78)
            escape_names = {"shellQuote", "escapeShell", "quote"};
        else if (cwe.id == 22)
            escape_names = {"sanitizePath", "normalizePath"};

        int escape_line = 0;
        std::string escape_name;
        {
            std::istringstream in(text);
            std::string line;
            int n = 0;
            while (std::getline(in, line) && !escape_line) {
                ++n;
                for (const auto& name : escape_names)
                    if (line.find(name) != std::string::npos) {
                        escape_line = n;
                        escape_name = name;
                        break;
                    }
            }
        }
        // A package-side override of the library's rendering rules defeats
        // the library's own escaping.
        bool overridden = false;
        std::string override_loc;
        for (const auto& f : idx.files) {
            std::istringstream in(f.src.text);
            std::string line;
            int n = 0;
            while (std::getline(in, line)) {
                ++n;
                if (line.find(".use(") != std::string::npos ||
                    line.find("renderer.rules") != std::string::npos) {
                    overridden = true;
                    override_loc =
                        f.src.path + ":" + std::to_string(n);
                }
            }
        }
        if (escape_line && !overridden) {
            out.classification = SummaryClass::Sanitizes;
            out.confidence = 5;
            out.trace = {"npm/" + entry + ":" + std::to_string(escape_line) +
                         ": output passes through " + escape_name};
        } else if (escape_line && overridden) {
            out.classification = SummaryClass::Propagates;
            out.confidence = 5;
            out.trace = {"npm/" + entry + ":" + std::to_string(escape_line) +
                             ": library escaping exists (" + escape_name + ")",
                         "package overrides renderer behavior at " +
                             override_loc,
                         "tainted value reaches the result unescaped"};
        } else {
            out.classification = SummaryClass::Propagates;
            out.confidence = 4;
            out.trace = {"npm/" + entry +
                         ": no recognized escaping on the traced path"};
        }
        return out;
    }

  private:
    static bool chain_is_maximal(const AstNode* node, const AstNode* parent) {
        if (!parent) return true;
        if (parent->kind != NodeKind::Member &&
            parent->kind != NodeKind::ComputedMember)
            return true;
        return parent->children[0].get() != node;
    }

    void collect_env_sources(const ProgramIndex& idx, const AstNode& root,
                             const AstNode* parent, DiscoveryRun& out) {
        visit_with_parent(root, parent, [&](const AstNode& n,
                                            const AstNode* par) {
            if (n.kind != NodeKind::Member && n.kind != NodeKind::ComputedMember)
                return;
            if (!chain_is_maximal(&n, par)) return;
            // Method calls are not reads of the chain itself.
            if (par && par->kind == NodeKind::Call &&
                par->children[0].get() == &n)
                return;
            std::string chain = dotted_chain(&n);
            if (chain.empty()) return;
            bool hit = chain == "location.hash" || chain == "input.value" ||
                       chain.rfind("req.query", 0) == 0 ||
                       chain.rfind("req.body", 0) == 0 ||
                       chain.rfind("req.params", 0) == 0 ||
                       chain.rfind("process.argv", 0) == 0;
            // Dynamic index reads like process.argv[2] keep the chain name
            // only up to the computed hop; accept them via the base chain.
            if (!hit && n.kind == NodeKind::ComputedMember) {
                std::string base = dotted_chain(n.children[0].get());
                hit = base == "process.argv" || base.rfind("req.query", 0) == 0 ||
                      base.rfind("req.body", 0) == 0 ||
                      base.rfind("req.params", 0) == 0;
            }
            if (!hit) return;
            int id = idx.id_of(&n);
            if (id < 0) return;
            out.sources.push_back({location_of(idx.node(id)), 5,
                                   "environment read: " +
                                       endpoint_text(idx.node(id).snippet)});
        });
    }

    void collect_sinks(const ProgramIndex& idx, const CweContext& cwe,
                       DiscoveryRun& out) {
        auto propose = [&](const AstNode* e, int confidence,
                           const std::string& reason) {
            int id = idx.id_of(e);
            if (id < 0) return;
            const FlowNode& n = idx.node(id);
            if (in_test_dir(n.file, idx.options)) return;
            out.sinks.push_back({location_of(n), confidence, reason});
        };
        std::set<std::string> call_sinks;
        bool first_arg_only = false;
        if (cwe.id == 94) call_sinks = {"eval", "Function"};
        if (cwe.id == 78) call_sinks = {"exec", "execSync", "spawn"};
        if (cwe.id == 22) {
            call_sinks = {"readFile",  "readFileSync",    "writeFile",
                          "writeFileSync", "createReadStream", "open",
                          "unlink"};
            first_arg_only = true;
        }
        if (cwe.id == 89) {
            call_sinks = {"query", "execute"};
            first_arg_only = true;
        }
        for (const auto& file : idx.files) {
            if (in_test_dir(file.src.path, idx.options)) continue;
            walk(*file.ast, [&](const AstNode& n) {
                if (n.kind == NodeKind::Call && !call_sinks.empty()) {
                    std::string name = callee_display_name(n);
                    if (call_sinks.count(name)) {
                        std::size_t last =
                            first_arg_only ? std::min<std::size_t>(
                                                 2, n.children.size())
                                           : n.children.size();
                        for (std::size_t i = 1; i < last; ++i)
                            propose(n.children[i].get(), 5,
                                    "argument of " + name);
                    }
                }
                if (cwe.id == 79) {
                    if (n.kind == NodeKind::TemplateLit) {
                        bool markup = false;
                        for (const auto& c : n.children)
                            if (c->kind == NodeKind::TemplateChunk &&
                                c->text.find('<') != std::string::npos)
                                markup = true;
                        if (markup)
                            for (const auto& c : n.children)
                                if (c->kind != NodeKind::TemplateChunk)
                                    propose(c.get(), 4,
                                            "interpolation into markup");
                    }
                    if (n.kind == NodeKind::Assign &&
                        n.children[0]->kind == NodeKind::Member &&
                        n.children[0]->text == "innerHTML")
                        propose(n.children[1].get(), 5,
                                "assignment to innerHTML");
                    if (n.kind == NodeKind::Call &&
                        dotted_chain(n.children[0].get()) == "document.write")
                        for (std::size_t i = 1; i < n.children.size(); ++i)
                            propose(n.children[i].get(), 5,
                                    "argument of document.write");
                }
                if (cwe.id == 915 && n.kind == NodeKind::Assign &&
                    n.children[0]->kind == NodeKind::ComputedMember)
                    propose(n.children[1].get(), 4,
                            "computed property write");
                if (cwe.id == 601) {
                    if (n.kind == NodeKind::Assign &&
                        dotted_chain(n.children[0].get()) == "location.href")
                        propose(n.children[1].get(), 5,
                                "assignment to location.href");
                    if (n.kind == NodeKind::Call &&
                        callee_display_name(n) == "redirect")
                        for (std::size_t i = 1; i < n.children.size(); ++i)
                            propose(n.children[i].get(), 5,
                                    "argument of redirect");
                }
            });
        }
    }

    template <typename Fn>
    static void visit_with_parent(const AstNode& n, const AstNode* parent,
                                  Fn&& fn) {
        fn(n, parent);
        for (const auto& c : n.children)
            visit_with_parent(*c, &n, fn);
    }
};

}  // namespace

std::unique_ptr<Backend> make_deterministic_backend() {
    return std::make_unique<DeterministicBackend>();
}

}  // namespace taintjs
