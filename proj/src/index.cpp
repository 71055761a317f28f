#include "taintjs/index.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <iterator>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace taintjs {

namespace {

std::optional<FlowKind> flow_kind_for(const AstNode& n) {
    switch (n.kind) {
        case NodeKind::Param: return FlowKind::Parameter;
        case NodeKind::FunctionDecl:
        case NodeKind::FunctionExpr:
        case NodeKind::ArrowFn: return FlowKind::Function;
        case NodeKind::Call: return FlowKind::Invocation;
        case NodeKind::ObjectLit: return FlowKind::ObjectLiteral;
        case NodeKind::Assign: {
            NodeKind lhs = n.children[0]->kind;
            return (lhs == NodeKind::Member || lhs == NodeKind::ComputedMember)
                       ? FlowKind::PropertyWrite
                       : FlowKind::Expression;
        }
        case NodeKind::Ident:
        case NodeKind::StringLit:
        case NodeKind::NumberLit:
        case NodeKind::BoolLit:
        case NodeKind::TemplateLit:
        case NodeKind::Binary:
        case NodeKind::Member:
        case NodeKind::ComputedMember: return FlowKind::Expression;
        default: return std::nullopt;
    }
}

int kind_order(FlowKind k) { return static_cast<int>(k); }

// --- lexical scope binding (function-level scoping) ---

struct Scope {
    Scope* parent = nullptr;
    std::map<std::string, const AstNode*> decls;

    const AstNode* lookup(const std::string& name) const {
        for (const Scope* s = this; s; s = s->parent) {
            auto it = s->decls.find(name);
            if (it != s->decls.end()) return it->second;
        }
        return nullptr;
    }
};

struct Binder {
    ProgramIndex& idx;

    // Registers declarations reachable in this scope without crossing into
    // nested function bodies.
    void hoist(const AstNode& n, Scope& scope) {
        switch (n.kind) {
            case NodeKind::FunctionDecl:
                scope.decls[n.text] = &n;
                return;  // body hoists into its own scope later
            case NodeKind::FunctionExpr:
            case NodeKind::ArrowFn:
                return;
            case NodeKind::VarDecl:
                scope.decls[n.children[0]->text] = n.children[0].get();
                idx.decl_stmt_of[n.children[0].get()] = &n;
                if (n.children.size() > 1) hoist(*n.children[1], scope);
                return;
            case NodeKind::ForOf:
                scope.decls[n.children[0]->text] = n.children[0].get();
                idx.decl_stmt_of[n.children[0].get()] = &n;
                for (std::size_t i = 1; i < n.children.size(); ++i)
                    hoist(*n.children[i], scope);
                return;
            default:
                for (const auto& c : n.children) hoist(*c, scope);
        }
    }

    void bind_function(const AstNode& fn, Scope& outer) {
        Scope inner;
        inner.parent = &outer;
        if (fn.kind == NodeKind::FunctionExpr && !fn.text.empty())
            inner.decls[fn.text] = &fn;
        for (const auto& c : fn.children)
            if (c->kind == NodeKind::Param) inner.decls[c->text] = c.get();
        const AstNode& body = *fn.children.back();
        hoist(body, inner);
        resolve(body, inner);
    }

    void add_value(const AstNode* decl, const AstNode* value) {
        if (decl && value) idx.values_of[decl].push_back(value);
    }

    void resolve(const AstNode& n, Scope& scope) {
        switch (n.kind) {
            case NodeKind::FunctionDecl:
            case NodeKind::FunctionExpr:
            case NodeKind::ArrowFn:
                bind_function(n, scope);
                return;
            case NodeKind::VarDecl:
                if (n.children.size() > 1) {
                    resolve(*n.children[1], scope);
                    add_value(n.children[0].get(), n.children[1].get());
                }
                return;
            case NodeKind::ForOf: {
                resolve(*n.children[1], scope);
                resolve(*n.children[2], scope);
                add_value(n.children[0].get(), n.children[1].get());
                return;
            }
            case NodeKind::Assign: {
                resolve(*n.children[0], scope);
                resolve(*n.children[1], scope);
                if (n.children[0]->kind == NodeKind::Ident) {
                    auto it = idx.decl_of.find(n.children[0].get());
                    if (it != idx.decl_of.end())
                        add_value(it->second, n.children[1].get());
                }
                return;
            }
            case NodeKind::Ident: {
                if (const AstNode* d = scope.lookup(n.text)) idx.decl_of[&n] = d;
                return;
            }
            case NodeKind::Member:
                resolve(*n.children[0], scope);
                return;
            default:
                for (const auto& c : n.children) resolve(*c, scope);
        }
    }

    void run(const ParsedFile& f) {
        Scope top;
        hoist(*f.ast, top);
        resolve(*f.ast, top);
    }
};

}  // namespace

bool is_require_call(const AstNode& n, std::string* specifier) {
    if (n.kind != NodeKind::Call || n.children.size() != 2) return false;
    if (n.children[0]->kind != NodeKind::Ident ||
        n.children[0]->text != "require")
        return false;
    if (n.children[1]->kind != NodeKind::StringLit) return false;
    if (specifier) *specifier = n.children[1]->text;
    return true;
}

namespace {

struct PathElem {
    bool computed = false;
    std::string name;  // empty for dynamic computed keys
};

// Peels member accesses off an expression; returns the root and appends the
// accessed names (outermost last) to `suffix`.
const AstNode* peel_access_path(const AstNode* expr,
                                std::vector<PathElem>& suffix) {
    std::vector<PathElem> rev;
    while (true) {
        if (expr->kind == NodeKind::Member) {
            rev.push_back({false, expr->text});
            expr = expr->children[0].get();
        } else if (expr->kind == NodeKind::ComputedMember) {
            PathElem e;
            e.computed = true;
            if (expr->children[1]->kind == NodeKind::StringLit)
                e.name = expr->children[1]->text;
            rev.push_back(e);
            expr = expr->children[0].get();
        } else {
            break;
        }
    }
    suffix.insert(suffix.begin(), rev.rbegin(), rev.rend());
    return expr;
}

struct BoundaryTracer {
    const ProgramIndex& idx;
    const std::string& file;
    std::set<const AstNode*> visited;

    bool first_party_specifier(const std::string& spec) const {
        if (spec.rfind("./", 0) != 0 && spec.rfind("../", 0) != 0) return false;
        fs::path base = fs::path(file).parent_path() / spec;
        std::vector<std::string> candidates = {
            base.lexically_normal().generic_string(),
            (base.lexically_normal().generic_string() + ".js"),
            (base / "index.js").lexically_normal().generic_string(),
        };
        for (const auto& f : idx.files)
            for (const auto& c : candidates)
                if (f.src.path == c) return true;
        return false;
    }

    Boundary merge(Boundary a, Boundary b) const {
        if (a == Boundary::Third || b == Boundary::Third) return Boundary::Third;
        if (a == Boundary::First || b == Boundary::First) return Boundary::First;
        return Boundary::Unknown;
    }

    Boundary classify(const AstNode* value, std::vector<PathElem> suffix,
                      std::optional<ImportWitness>* witness) {
        if (!value) return Boundary::Unknown;
        std::string spec;
        if (is_require_call(*value, &spec)) {
            if (first_party_specifier(spec)) return Boundary::First;
            if (witness && !*witness)
                *witness = ImportWitness{file, value->span.start_line, spec};
            return Boundary::Third;
        }
        if (is_function_kind(value->kind))
            return suffix.empty() ? Boundary::First : Boundary::Unknown;
        if (value->kind == NodeKind::ObjectLit) {
            if (suffix.empty() || suffix.front().computed ||
                suffix.front().name.empty())
                return Boundary::Unknown;
            for (const auto& prop : value->children) {
                if (prop->text == suffix.front().name) {
                    std::vector<PathElem> rest(suffix.begin() + 1, suffix.end());
                    return classify(prop->children[0].get(), rest, witness);
                }
            }
            return Boundary::Unknown;
        }
        if (value->kind == NodeKind::Ident || value->kind == NodeKind::Member ||
            value->kind == NodeKind::ComputedMember) {
            std::vector<PathElem> combined;
            const AstNode* root = peel_access_path(value, combined);
            combined.insert(combined.end(), suffix.begin(), suffix.end());
            if (root->kind != NodeKind::Ident)
                return classify_root(root, combined, witness);
            auto dit = idx.decl_of.find(root);
            if (dit == idx.decl_of.end()) return Boundary::Unknown;
            return classify_decl(dit->second, combined, witness);
        }
        // Object.assign(a, b, ...): the result carries whichever source the
        // arguments trace to.
        if (value->kind == NodeKind::Call) {
            std::vector<PathElem> callee_path;
            const AstNode* root =
                peel_access_path(value->children[0].get(), callee_path);
            if (root->kind == NodeKind::Ident && root->text == "Object" &&
                callee_path.size() == 1 && callee_path[0].name == "assign") {
                Boundary out = Boundary::Unknown;
                for (std::size_t i = 1; i < value->children.size(); ++i)
                    out = merge(out, classify(value->children[i].get(), suffix,
                                              witness));
                return out;
            }
            return Boundary::Unknown;
        }
        return Boundary::Unknown;
    }

    Boundary classify_root(const AstNode* root, std::vector<PathElem> suffix,
                           std::optional<ImportWitness>* witness) {
        return classify(root, std::move(suffix), witness);
    }

    Boundary classify_decl(const AstNode* decl, std::vector<PathElem> suffix,
                           std::optional<ImportWitness>* witness) {
        if (!visited.insert(decl).second) return Boundary::Unknown;
        if (decl->kind == NodeKind::FunctionDecl)
            return suffix.empty() ? Boundary::First : Boundary::Unknown;
        if (decl->kind == NodeKind::Param) return Boundary::Unknown;
        Boundary out = Boundary::Unknown;
        auto vit = idx.values_of.find(decl);
        if (vit != idx.values_of.end())
            for (const AstNode* v : vit->second)
                out = merge(out, classify(v, suffix, witness));
        return out;
    }
};

void collect_returns(const AstNode& n, const ProgramIndex& idx,
                     std::vector<int>& out) {
    if (is_function_kind(n.kind)) return;
    if (n.kind == NodeKind::Return && !n.children.empty()) {
        int id = idx.id_of(n.children[0].get());
        if (id >= 0) out.push_back(id);
    }
    for (const auto& c : n.children) collect_returns(*c, idx, out);
}

std::string callee_name_of(const AstNode& call) {
    const AstNode& callee = *call.children[0];
    if (callee.kind == NodeKind::Ident) return callee.text;
    if (callee.kind == NodeKind::Member) return callee.text;
    if (callee.kind == NodeKind::ComputedMember &&
        callee.children[1]->kind == NodeKind::StringLit)
        return callee.children[1]->text;
    return "";
}

}  // namespace

const char* flow_kind_name(FlowKind k) {
    switch (k) {
        case FlowKind::Expression: return "expression";
        case FlowKind::Parameter: return "parameter";
        case FlowKind::Invocation: return "invocation";
        case FlowKind::Function: return "function";
        case FlowKind::PropertyWrite: return "property-write";
        case FlowKind::ObjectLiteral: return "object-literal";
    }
    return "?";
}

const char* boundary_name(Boundary b) {
    switch (b) {
        case Boundary::First: return "first";
        case Boundary::Third: return "third";
        case Boundary::Unknown: return "unknown";
    }
    return "?";
}

bool in_test_dir(const std::string& path, const IndexOptions& options) {
    fs::path p(path);
    std::string filename = p.filename().string();
    for (const char* suffix : {".test.js", ".spec.js"}) {
        std::size_t n = std::string(suffix).size();
        if (filename.size() > n &&
            filename.compare(filename.size() - n, n, suffix) == 0)
            return true;
    }
    for (auto it = p.begin(); it != p.end(); ++it) {
        if (std::next(it) == p.end()) break;  // skip the filename itself
        for (const auto& d : options.test_dirs)
            if (it->string() == d) return true;
    }
    return false;
}

ProgramIndex build_program_index(std::string package_root,
                                 std::vector<ParsedFile> files,
                                 IndexOptions options,
                                 std::vector<std::string> third_party_files) {
    ProgramIndex idx;
    idx.package_root = std::move(package_root);
    idx.options = std::move(options);
    idx.third_party_files = std::move(third_party_files);
    std::sort(idx.third_party_files.begin(), idx.third_party_files.end());
    idx.files = std::move(files);
    std::sort(idx.files.begin(), idx.files.end(),
              [](const ParsedFile& a, const ParsedFile& b) {
                  return a.src.path < b.src.path;
              });

    // FlowNodes, in file-path then span order.
    struct Raw {
        std::string file;
        Span span;
        FlowKind kind;
        const AstNode* ast;
        std::string snippet;
    };
    std::vector<Raw> raws;
    for (const auto& f : idx.files) {
        walk(*f.ast, [&](const AstNode& n) {
            if (auto k = flow_kind_for(n))
                raws.push_back({f.src.path, n.span, *k, &n, n.snippet});
        });
    }
    std::stable_sort(raws.begin(), raws.end(), [](const Raw& a, const Raw& b) {
        return std::tie(a.file, a.span.start_line, a.span.start_col,
                        a.span.end_line, a.span.end_col) <
                   std::tie(b.file, b.span.start_line, b.span.start_col,
                            b.span.end_line, b.span.end_col) ||
               (a.file == b.file && a.span == b.span &&
                kind_order(a.kind) < kind_order(b.kind));
    });
    for (const Raw& r : raws) {
        FlowNode n;
        n.id = static_cast<int>(idx.nodes.size());
        n.file = r.file;
        n.span = r.span;
        n.snippet = r.snippet;
        n.kind = r.kind;
        n.ast = r.ast;
        idx.node_of_ast[r.ast] = n.id;
        idx.nodes.push_back(std::move(n));
    }

    // Lexical binding before entries, so values_of is available.
    Binder binder{idx};
    for (const auto& f : idx.files) binder.run(f);

    // Function and invocation entries, in FlowNode id order (already
    // file-path then span order).
    for (const FlowNode& n : idx.nodes) {
        if (n.kind == FlowKind::Function) {
            FunctionEntry fe;
            fe.index = static_cast<int>(idx.functions.size());
            fe.name = n.ast->text;
            fe.file = n.file;
            fe.span = n.span;
            fe.node = n.id;
            fe.ast = n.ast;
            for (const auto& c : n.ast->children)
                if (c->kind == NodeKind::Param)
                    fe.params.push_back(idx.id_of(c.get()));
            collect_returns(*n.ast->children.back(), idx, fe.returns);
            idx.function_of_ast[n.ast] = fe.index;
            idx.functions.push_back(std::move(fe));
        } else if (n.kind == FlowKind::Invocation) {
            InvocationEntry ie;
            ie.node = n.id;
            ie.file = n.file;
            ie.ast = n.ast;
            ie.callee_name = callee_name_of(*n.ast);
            for (std::size_t i = 1; i < n.ast->children.size(); ++i)
                ie.args.push_back(idx.id_of(n.ast->children[i].get()));
            ie.in_test_dir = in_test_dir(n.file, idx.options);
            idx.invocation_of_node[n.id] =
                static_cast<int>(idx.invocations.size());
            idx.invocations.push_back(std::move(ie));
        }
    }

    for (InvocationEntry& ie : idx.invocations) {
        std::optional<ImportWitness> w;
        ie.boundary_hint = classify_boundary(ie, idx, &w);
        ie.witness = std::move(w);
    }
    return idx;
}

ProgramIndex load_package(const std::string& root, IndexOptions options) {
    std::vector<ParsedFile> files;
    std::vector<std::string> third_party;
    std::vector<fs::path> first_party_paths;
    for (fs::recursive_directory_iterator it(root), end; it != end; ++it) {
        if (it->is_directory()) {
            if (it->path().filename() == "node_modules") {
                for (const auto& sub :
                     fs::recursive_directory_iterator(it->path()))
                    if (sub.is_regular_file() &&
                        sub.path().extension() == ".js")
                        third_party.push_back(
                            fs::relative(sub.path(), root).generic_string());
                it.disable_recursion_pending();
            }
            continue;
        }
        if (it->is_regular_file() && it->path().extension() == ".js")
            first_party_paths.push_back(it->path());
    }
    std::sort(first_party_paths.begin(), first_party_paths.end());
    for (const auto& p : first_party_paths) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        SourceFile src =
            SourceFile::load(fs::relative(p, root).generic_string(), buf.str());
        AstNodePtr ast = parse_source(src);
        files.push_back(ParsedFile{std::move(src), std::move(ast)});
    }
    return build_program_index(root, std::move(files), std::move(options),
                               std::move(third_party));
}

std::vector<const FunctionEntry*> lookup_functions(
    const ProgramIndex& index, const std::optional<std::string>& name,
    const std::optional<std::string>& file) {
    if (!name && !file) throw EmptyQuery("lookup_functions needs a filter");
    auto lower = [](std::string s) {
        for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    };
    std::string ln = name ? lower(*name) : "";
    std::string lf = file ? lower(*file) : "";
    std::vector<const FunctionEntry*> exact, fuzzy;
    for (const FunctionEntry& fe : index.functions) {
        std::string fe_name = lower(fe.name);
        std::string fe_file = lower(fe.file);
        bool name_ok = !name || fe_name.find(ln) != std::string::npos;
        bool file_ok = !file || fe_file.find(lf) != std::string::npos;
        if (!name_ok || !file_ok) continue;
        if (name && fe_name == ln)
            exact.push_back(&fe);
        else
            fuzzy.push_back(&fe);
    }
    exact.insert(exact.end(), fuzzy.begin(), fuzzy.end());
    return exact;
}

Boundary classify_boundary(const InvocationEntry& invocation,
                           const ProgramIndex& index,
                           std::optional<ImportWitness>* witness) {
    std::optional<ImportWitness> local;
    BoundaryTracer tracer{index, invocation.file, {}};
    Boundary b = tracer.classify(invocation.ast->children[0].get(), {}, &local);
    if (b != Boundary::Third) local.reset();
    if (witness) *witness = local;
    return b;
}

std::string dump_index(const ProgramIndex& index) {
    std::string out;
    for (const FlowNode& n : index.nodes) {
        nlohmann::ordered_json j;
        j["id"] = n.id;
        j["kind"] = flow_kind_name(n.kind);
        j["file"] = n.file;
        j["span"] = {n.span.start_line, n.span.start_col, n.span.end_line,
                     n.span.end_col};
        j["snippet"] = endpoint_text(n.snippet);
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace taintjs
